/*
 * Copyright 2026 The spose Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "complexity/complexity.hpp"

#include <iomanip>

#include "model/model.hpp"
#include "model/params.hpp"
#include "numerics/rng.hpp"

namespace spose {

void ComplexityInput::validate() const {
    require(N > 0 && T > 0 && D > 0 && S > 0 && K > 0, ErrorKind::config,
            "complexity inputs N, T, D, S, K must all be positive");
}

Rational flops_vte_layer(const Rational &t, std::uint64_t d) {
    const Rational dd(d);
    return 8 * t * dd * dd + 2 * t * t * dd;
}

Rational flops_ste_layer(const Rational &t, std::uint64_t d, std::uint64_t s, std::uint64_t k) {
    const Rational dd(d);
    return (6 + Rational(2 * k, s)) * t * dd * dd + 2 * t * t * dd;
}

BigInt flops_vte(const ComplexityInput &in) {
    in.validate();
    const BigInt T(in.T), D(in.D);
    return BigInt(in.N) * (8 * T * D * D + 2 * T * T * D);
}

Rational flops_ste_exact(const ComplexityInput &in) {
    in.validate();
    Rational total = 0;
    Rational t(in.T);
    for (std::uint64_t n = 0; n < in.N; ++n) {
        total += flops_ste_layer(t, in.D, in.S, in.K);
        t /= in.S;
    }
    return total;
}

BigInt flops_ste(const ComplexityInput &in) {
    const Rational f = flops_ste_exact(in);
    // Round half up; f is non-negative.
    const Rational shifted = f + Rational(1, 2);
    return numerator(shifted) / denominator(shifted);
}

CompressionRatio compression_ratio(const ComplexityInput &in) {
    const Rational vte(flops_vte(in));
    const Rational ste = flops_ste_exact(in);
    return {2 * vte / (vte + ste), ste / vte};
}

Rational beta_closed_form(std::uint64_t T, std::uint64_t D) {
    return Rational(468 * BigInt(D) + 91 * BigInt(T), 972 * BigInt(D) + 243 * BigInt(T));
}

double to_double(const Rational &r) { return r.convert_to<double>(); }
double to_double(const BigInt &i) { return i.convert_to<double>(); }

ParamCount count_params(const ModelConfig &cfg) {
    ParamCount pc;
    for (const ParamSpec &spec : param_specs(cfg)) {
        const std::size_t n = shape_size(spec.shape);
        pc.total += n;
        std::string module = spec.path.substr(0, spec.path.find('.'));
        if (module == "vte" || module == "ste") {
            const auto second = spec.path.find('.', module.size() + 1);
            module = spec.path.substr(0, second);
        }
        pc.by_module[module] += n;
    }
    return pc;
}

std::vector<LayerMacs> measure_macs(const ModelConfig &cfg, std::uint64_t seed) {
    cfg.validate();
    const ParameterSet params = init_params(cfg, seed);
    RngStream rng(seed ^ 0x5eedULL);
    Grid input({cfg.T, cfg.J, 2});
    for (auto &v : input.data()) v = rng.uniform(-1.0, 1.0);
    MacCounter counter;
    predict(cfg, params, input, false, &counter);

    const std::uint64_t d = cfg.d_m, df = cfg.d_f;
    std::vector<LayerMacs> out;
    const std::size_t vanilla = cfg.N1 + (cfg.second_stack() == StackKind::vanilla ? cfg.N2 : 0);
    for (std::size_t i = 0; i < vanilla; ++i) {
        LayerMacs l;
        l.scope = "vte." + std::to_string(i);
        l.length = cfg.T;
        l.measured = counter.at(l.scope);
        const Rational t(cfg.T);
        l.analytic = 4 * t * d * d + 2 * t * t * d + 2 * t * d * df;
        out.push_back(l);
    }
    if (cfg.second_stack() == StackKind::strided) {
        const auto lengths = cfg.strided_lengths();
        for (std::size_t n = 0; n < cfg.N2; ++n) {
            LayerMacs l;
            l.scope = "ste." + std::to_string(n);
            l.length = lengths[n];
            l.stride = cfg.s_m[n];
            l.measured = counter.at(l.scope);
            const Rational t(lengths[n]);
            l.analytic = 4 * t * d * d + 2 * t * t * d + t * cfg.k_f * d * df + t / l.stride * cfg.k_m * df * d;
            out.push_back(l);
        }
    }
    return out;
}

ComplexityReport complexity_report(const ComplexityInput &in) {
    ComplexityReport r;
    r.input = in;
    r.flops_vte = flops_vte(in);
    r.flops_ste = flops_ste(in);
    const CompressionRatio cr = compression_ratio(in);
    r.alpha = cr.alpha;
    r.beta = cr.beta;
    return r;
}

ComplexityReport complexity_report(const ComplexityInput &in, const ModelConfig &cfg) {
    ComplexityReport r = complexity_report(in);
    r.param_count = count_params(cfg).total;
    r.measured = measure_macs(cfg);
    return r;
}

void write_report_text(std::ostream &os, const ComplexityReport &r) {
    const auto &in = r.input;
    os << "# complexity report (1 MAC counted as 1 FLOP)\n";
    os << "N=" << in.N << " T=" << in.T << " D=" << in.D << " (d_f=" << 2 * in.D << ") S=" << in.S << " K=" << in.K
       << '\n';
    os << "F_VTE  = " << r.flops_vte << " MACs\n";
    os << "F_STE  = " << r.flops_ste << " MACs\n";
    os << std::fixed << std::setprecision(6);
    os << "beta   = " << to_double(r.beta) << '\n';
    os << "alpha  = " << to_double(r.alpha) << '\n';
    os.unsetf(std::ios::floatfield);
    if (r.param_count) os << "params = " << r.param_count << '\n';
    if (!r.measured.empty()) {
        os << "layer      length stride     measured     analytic\n";
        for (const auto &l : r.measured)
            os << std::left << std::setw(10) << l.scope << std::right << std::setw(7) << l.length << std::setw(7)
               << l.stride << std::setw(13) << l.measured << std::setw(13) << std::setprecision(12)
               << to_double(l.analytic) << '\n';
    }
}

void write_report_csv(std::ostream &os, const ComplexityReport &r) {
    const auto &in = r.input;
    os << "# MAC convention: 1 MAC = 1 FLOP\n";
    os << "key,value\n";
    os << "N," << in.N << "\nT," << in.T << "\nD," << in.D << "\nS," << in.S << "\nK," << in.K << '\n';
    os << "flops_vte," << r.flops_vte << "\nflops_ste," << r.flops_ste << '\n';
    os << std::setprecision(17) << "beta," << to_double(r.beta) << "\nalpha," << to_double(r.alpha) << '\n';
    os << "param_count," << r.param_count << '\n';
    for (const auto &l : r.measured)
        os << "measured." << l.scope << ',' << l.measured << "\nanalytic." << l.scope << ','
           << to_double(l.analytic) << '\n';
}

}  // namespace spose
