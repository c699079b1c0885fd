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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "complexity/complexity.hpp"
#include "metrics/losses.hpp"
#include "metrics/metrics.hpp"
#include "model/checkpoint.hpp"
#include "model/model.hpp"
#include "numerics/error.hpp"
#include "numerics/gradcheck.hpp"
#include "numerics/rng.hpp"
#include "synth/dataset.hpp"
#include "train/trainer.hpp"
#include "util/log.hpp"

using namespace spose;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string &s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int g_failures = 0;
int g_run = 0;
std::vector<int> g_only;  // criteria named on the command line; empty runs all

void run(int id, const char *name, const std::function<Outcome()> &body) {
    if (!g_only.empty() && std::find(g_only.begin(), g_only.end(), id) == g_only.end()) return;
    ++g_run;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception &e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++g_failures;
    std::printf("%s  %2d %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

Grid random_grid(Shape shape, std::uint64_t seed, double scale = 1.0) {
    Grid g(std::move(shape));
    RngStream rng(seed);
    for (double &v : g.data()) v = scale * rng.uniform(-1.0, 1.0);
    return g;
}

// ---------------------------------------------------------------- 1

Outcome complexity_reproduction() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const ComplexityReport r = complexity_report({3, 27, 256, 3, 3});
    const double alpha_wide = to_double(compression_ratio({3, 27, 1000000, 3, 3}).alpha);
    std::ostringstream text;
    write_report_text(text, r);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double alpha = to_double(r.alpha);
    o.require(r.flops_vte == 43587072, "F_VTE = 43587072");
    o.require(r.flops_ste == 20866560, "F_STE = 20866560");
    o.require(text.str().find("43587072") != std::string::npos && text.str().find("20866560") != std::string::npos,
              "report text lists both counts");
    o.require(std::abs(alpha - 1.3525) <= 0.0005, "alpha within 1.3525 +- 0.0005");
    o.require(std::abs(alpha_wide - 1.35) <= 0.005, "alpha at D=1e6 within 1.35 +- 0.005");
    o.require(secs < 1.0, "runtime under 1 s");
    o.note("F_VTE=" + r.flops_vte.str() + " F_STE=" + r.flops_ste.str() + " alpha=" + fmt("%.6f", alpha) +
           " alpha(D=1e6)=" + fmt("%.6f", alpha_wide) + " t=" + fmt("%.4fs", secs));
    return o;
}

// ---------------------------------------------------------------- 2

// Strided-encoder cost summed layer by layer from the per-layer definition.
Rational raw_beta(std::uint64_t T, std::uint64_t D) {
    const std::uint64_t N = 3, S = 3, K = 3;
    Rational vte = 0, ste = 0, len = T;
    for (std::uint64_t n = 0; n < N; ++n) {
        vte += Rational(8 * T * D * D + 2 * T * T * D);
        ste += (Rational(6) + Rational(2 * K, S)) * len * D * D + 2 * len * len * D;
        len /= S;
    }
    return ste / vte;
}

Outcome beta_equivalence() {
    Outcome o;
    RngStream rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t T = 1 + rng.below(500), D = 1 + rng.below(4096);
        worst = std::max(worst, std::abs(to_double(beta_closed_form(T, D)) - to_double(raw_beta(T, D))));
        o.require(beta_closed_form(T, D) == compression_ratio({3, T, D, 3, 3}).beta, "library beta equals closed form");
    }
    o.require(worst <= 1e-12, "closed form within 1e-12 of the raw sum");
    o.note("100 pairs, max |diff| = " + fmt("%.3g", worst));
    return o;
}

// ---------------------------------------------------------------- 3

Outcome parameter_count() {
    Outcome o;
    const ModelConfig full;  // 27 frames
    ModelConfig vte = full;
    vte.N2 = 0;
    vte.s_m = {};
    vte.mode = Mode::full;
    const std::size_t a = count_params(full).total, b = count_params(vte).total;
    o.require(std::abs(double(a) - 4.01e6) <= 0.05 * 4.01e6, "27-frame model within 5% of 4.01M");
    o.require(std::abs(double(b) - 1.61e6) <= 0.05 * 1.61e6, "VTE-only within 5% of 1.61M");
    o.note("27-frame " + std::to_string(a) + " (" + fmt("%+.2f%%", 100.0 * (double(a) / 4.01e6 - 1)) + "), VTE-only " +
           std::to_string(b) + " (" + fmt("%+.2f%%", 100.0 * (double(b) / 1.61e6 - 1)) +
           "); no refine module in either count");
    return o;
}

// ---------------------------------------------------------------- 4

Outcome shape_schedule() {
    Outcome o;
    const std::vector<std::pair<std::size_t, std::vector<std::size_t>>> expect = {
        {27, {27, 9, 3, 1}}, {81, {81, 9, 3, 1}}, {243, {243, 81, 9, 1}}, {351, {351, 117, 13, 1}}};
    for (const auto &[T, lengths] : expect) {
        ModelConfig c = ModelConfig::for_frames(T);
        o.require(c.strided_lengths() == lengths, "configured lengths for T=" + std::to_string(T));
        // narrow copy so the forward pass is cheap; lengths depend only on T and strides
        c.d_m = 8;
        c.d_f = 16;
        c.h = 2;
        c.N1 = 1;
        const ParameterSet p = init_params(c, 1);
        const ForwardOutput out = predict(c, p, random_grid({T, c.J, 2}, 2, 0.5), true);
        std::vector<std::size_t> seen;
        for (const auto &rec : out.attention)
            if (rec.module == "ste") seen.push_back(rec.maps.dim(2));
        seen.push_back(1);
        o.require(seen == lengths, "measured stage lengths for T=" + std::to_string(T));
        o.require(out.seq3d && out.seq3d->shape() == Shape{T, 17, 3}, "sequence output (T,17,3) for T=" + std::to_string(T));
        o.require(out.target3d.shape() == Shape{17, 3}, "center output (17,3) for T=" + std::to_string(T));
    }
    o.note("T=27,81,243,351 stage lengths and output shapes checked");
    return o;
}

// ---------------------------------------------------------------- 5

Var weighted_sum(Tape &t, Var y, std::uint64_t seed) {
    return ag::sum(ag::mul(y, t.constant(random_grid(y.shape(), seed))));
}

Grid away_from_zero(Shape s, std::uint64_t seed) {
    Grid g = random_grid(std::move(s), seed);
    for (double &v : g.data()) v = v >= 0 ? 0.1 + v : -0.1 + v;
    return g;
}

double model_grad_error(const ModelConfig &cfg, std::size_t B, std::uint64_t seed, std::size_t *coords) {
    const ParameterSet base = init_params(cfg, seed);
    const Grid input = random_grid({B, cfg.T, cfg.J, 2}, seed + 1, 0.5);
    const Grid target_seq = random_grid({B, cfg.T, cfg.J, 3}, seed + 2, 0.5);
    auto loss_of = [&](ParameterSet ps, Gradients *grads) {
        Tape t;
        ParamBinder bind(t, ps);
        ForwardOptions fo;
        fo.train = true;
        const GraphOutput g = forward_graph(bind, cfg, t.constant(input), fo);
        Var total;
        for (const auto &head : {g.head1, g.head2}) {
            if (!head) continue;
            Var l;
            if (head->shape()[1] == cfg.T) {
                l = sequence_loss(*head, target_seq);
            } else {
                Grid center({B, 1, cfg.J, 3});
                const std::size_t c = cfg.T / 2, n = cfg.J * 3;
                for (std::size_t b = 0; b < B; ++b)
                    for (std::size_t k = 0; k < n; ++k) center[b * n + k] = target_seq[(b * cfg.T + c) * n + k];
                l = single_frame_loss(*head, center);
            }
            total = total.valid() ? ag::add(total, l) : l;
        }
        if (grads) *grads = t.backward(total);
        return total.value()[0];
    };
    Gradients analytic;
    loss_of(base, &analytic);
    double worst = 0.0;
    const double eps = 1e-5;
    *coords = 0;
    for (const auto &[path, value] : base.values) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            ParameterSet up = base, down = base;
            up.values[path][i] += eps;
            down.values[path][i] -= eps;
            const double numeric = (loss_of(up, nullptr) - loss_of(down, nullptr)) / (2 * eps);
            const double a = analytic.at(path)[i];
            worst = std::max(worst, std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)}));
            ++*coords;
        }
    }
    return worst;
}

Outcome gradient_integrity() {
    Outcome o;
    using Make = std::function<std::vector<Grid>(std::uint64_t)>;
    using Op = std::function<Var(Tape &, const std::vector<Var> &)>;
    auto shapes = [](std::vector<Shape> ss, double scale = 1.0) -> Make {
        return [ss, scale](std::uint64_t s) {
            std::vector<Grid> out;
            for (std::size_t i = 0; i < ss.size(); ++i) out.push_back(random_grid(ss[i], s + i, scale));
            return out;
        };
    };
    const Make kinkless = [](std::uint64_t s) { return std::vector<Grid>{away_from_zero({2, 5}, s)}; };
    const Make pool_input = [](std::uint64_t s) {
        Grid g({2, 7, 3});
        RngStream r(s);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.01 * static_cast<double>(i);
        for (std::size_t i = g.size(); i > 1; --i) std::swap(g[i - 1], g[r.below(i)]);
        return std::vector<Grid>{g};
    };
    const Make norm_args = shapes({{2, 4, 5}, {5}, {5}}, 2.0);
    const std::vector<std::tuple<const char *, Make, Op>> ops = {
        {"add", shapes({{3, 4}, {3, 4}}), [](Tape &, const std::vector<Var> &p) { return ag::add(p[0], p[1]); }},
        {"sub", shapes({{3, 4}, {3, 4}}), [](Tape &, const std::vector<Var> &p) { return ag::sub(p[0], p[1]); }},
        {"mul", shapes({{3, 4}, {3, 4}}), [](Tape &, const std::vector<Var> &p) { return ag::mul(p[0], p[1]); }},
        {"scale", kinkless, [](Tape &, const std::vector<Var> &p) { return ag::scale(p[0], -1.7); }},
        {"square", kinkless, [](Tape &, const std::vector<Var> &p) { return ag::square(p[0]); }},
        {"relu", kinkless, [](Tape &, const std::vector<Var> &p) { return ag::relu(p[0]); }},
        {"reshape", kinkless, [](Tape &, const std::vector<Var> &p) { return ag::reshape(p[0], {5, 2}); }},
        {"sum", kinkless, [](Tape &, const std::vector<Var> &p) { return ag::sum(p[0]); }},
        {"add_table", shapes({{2, 4, 3}, {4, 3}}),
         [](Tape &, const std::vector<Var> &p) { return ag::add_table(p[0], p[1]); }},
        {"take_frame", shapes({{2, 5, 3, 2}}), [](Tape &, const std::vector<Var> &p) { return ag::take_frame(p[0], 2); }},
        {"linear", shapes({{4, 5}, {5, 3}, {3}}),
         [](Tape &, const std::vector<Var> &p) { return ag::linear(p[0], p[1], p[2]); }},
        {"conv1d_strided", shapes({{2, 10, 3}, {3, 3, 4}, {4}}),
         [](Tape &, const std::vector<Var> &p) { return ag::conv1d_strided(p[0], p[1], p[2], 3); }},
        {"maxpool1d", pool_input, [](Tape &, const std::vector<Var> &p) { return ag::maxpool1d(p[0], 3); }},
        {"softmax", shapes({{3, 5}}, 2.0), [](Tape &, const std::vector<Var> &p) { return ag::softmax(p[0], 1); }},
        {"layer_norm", norm_args,
         [](Tape &, const std::vector<Var> &p) { return ag::layer_norm(p[0], p[1], p[2]); }},
        {"batch_norm_train", norm_args,
         [](Tape &, const std::vector<Var> &p) {
             static thread_local kernels::BatchNormStats stats;
             stats = kernels::BatchNormStats::fresh(5);
             return ag::batch_norm_train(p[0], p[1], p[2], stats);
         }},
        {"batch_norm_eval", norm_args,
         [](Tape &, const std::vector<Var> &p) {
             const kernels::BatchNormStats stats{random_grid({5}, 3), Grid({5}, 0.7), true};
             return ag::batch_norm_eval(p[0], p[1], p[2], stats);
         }},
        {"dropout", shapes({{4, 6}}),
         [](Tape &, const std::vector<Var> &p) {
             RngStream rng(77);
             return ag::dropout(p[0], 0.3, rng, true);
         }},
        {"attention", shapes({{2, 5, 4}, {2, 5, 4}, {2, 5, 4}}),
         [](Tape &, const std::vector<Var> &p) { return ag::attention(p[0], p[1], p[2], 2); }},
    };
    double worst_op = 0.0;
    std::string worst_name;
    for (const auto &[name, make, op] : ops) {
        for (int i = 0; i < 10; ++i) {
            const std::uint64_t seed = 1000 * (i + 1);
            const ScalarFn f = [&, op = op](Tape &t, const std::vector<Var> &p) {
                return weighted_sum(t, op(t, p), seed + 999);
            };
            const double e = grad_check(f, make(seed)).max_rel_error;
            if (e > worst_op) worst_op = e, worst_name = name;
            o.require(e <= 1e-5, std::string(name) + " grad check");
        }
    }
    for (int i = 0; i < 10; ++i) {
        const Grid target = random_grid({3, 4, 3}, 500 + i);
        const ScalarFn f = [&](Tape &, const std::vector<Var> &p) { return ag::l2_norm_sum(p[0], target); };
        const double e = grad_check(f, {random_grid({3, 4, 3}, 600 + i)}).max_rel_error;
        if (e > worst_op) worst_op = e, worst_name = "l2_norm_sum";
        o.require(e <= 1e-5, "l2_norm_sum grad check");
    }

    ModelConfig toy;
    toy.T = 9;
    toy.J = 5;
    toy.d_m = 16;
    toy.d_f = 32;
    toy.h = 2;
    toy.N1 = 1;
    toy.N2 = 1;
    toy.s_m = {9};
    toy.dropout = 0.0;
    toy.validate();
    std::size_t coords = 0;
    const double model_err = model_grad_error(toy, 2, 31, &coords);
    o.require(model_err <= 1e-5, "end-to-end toy model grad check");
    o.note(std::to_string(ops.size() + 1) + " ops, worst " + fmt("%.2e", worst_op) + " (" + worst_name +
           "); toy model " + std::to_string(coords) + " coordinates, worst " + fmt("%.2e", model_err));
    return o;
}

// ---------------------------------------------------------------- 6

Outcome measured_macs() {
    Outcome o;
    const ModelConfig c;  // 27 frames, divisible strides
    const auto layers = measure_macs(c);
    o.require(layers.size() == 6, "six encoder layers");
    for (const auto &l : layers)
        o.require(Rational(l.measured) == l.analytic, l.scope + " measured equals analytic");

    ModelConfig padded;
    padded.T = 100;
    padded.d_m = 32;
    padded.d_f = 64;
    padded.h = 4;
    padded.N1 = 1;
    padded.N2 = 2;
    padded.s_m = {3, 34};
    double worst = 0.0;
    for (const auto &l : measure_macs(padded)) {
        if (l.scope.rfind("ste", 0) != 0) continue;
        const Rational eq = flops_ste_layer(Rational(l.length), padded.d_m, l.stride, padded.k_m);
        const double rel = std::abs(to_double((Rational(l.measured) - eq) / eq));
        worst = std::max(worst, rel);
        o.require(rel <= 0.05, l.scope + " padded stage within 5%");
    }
    o.note("27-frame layers exact; T=100 strides {3,34} worst deviation " + fmt("%.3f%%", 100.0 * worst));
    return o;
}

// ---------------------------------------------------------------- 7

std::array<double, 9> random_rotation(RngStream &r) {
    double q[4], n = 0.0;
    for (double &v : q) {
        v = r.normal();
        n += v * v;
    }
    n = std::sqrt(n);
    for (double &v : q) v /= n;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
            2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
            2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

Outcome metric_correctness() {
    Outcome o;
    RngStream rng(7);
    double inv = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Grid pred = random_grid({17, 3}, 100 + i, 500.0), gt = random_grid({17, 3}, 5000 + i, 500.0);
        const auto R = random_rotation(rng);
        const double s = rng.uniform(0.2, 5.0);
        const std::array<double, 3> t{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)};
        Grid moved(pred.shape());
        for (std::size_t j = 0; j < 17; ++j)
            for (int a = 0; a < 3; ++a)
                moved[3 * j + a] = s * (R[3 * a] * pred[3 * j] + R[3 * a + 1] * pred[3 * j + 1] +
                                        R[3 * a + 2] * pred[3 * j + 2]) + t[a];
        inv = std::max(inv, std::abs(p_mpjpe(moved, gt) - p_mpjpe(pred, gt)));
    }
    o.require(inv <= 1e-9, "P-MPJPE similarity invariance within 1e-9");

    bool ordered = true;
    for (int i = 0; i < 1000; ++i) {
        const Grid a = random_grid({17, 3}, 20000 + i, 300.0), b = random_grid({17, 3}, 40000 + i, 300.0);
        ordered = ordered && p_mpjpe(a, b) <= mpjpe(a, b) + 1e-9;
    }
    o.require(ordered, "P-MPJPE <= MPJPE on 1000 pairs");

    const Grid seq = random_grid({12, 17, 3}, 9, 400.0);
    Grid shifted = seq;
    for (std::size_t i = 0; i < shifted.size(); i += 3) shifted[i] += 25.0, shifted[i + 2] -= 10.0;
    o.require(mpjve(shifted, seq) <= 1e-9, "MPJVE zero under a constant offset");

    // Loss oracles: one joint off by a 3-4-5 triangle, another by 12-5-13.
    Grid gt = random_grid({4, 5, 3}, 10, 100.0), pr = gt;
    pr[3 * 2] += 3.0, pr[3 * 2 + 1] += 4.0;
    pr[3 * 11 + 1] -= 12.0, pr[3 * 11 + 2] += 5.0;
    o.require(std::abs(sequence_loss(pr, gt) - 18.0) <= 1e-12 * 18.0, "sequence loss oracle");
    Grid fa({2, 3}), fb({2, 3});
    fa[0] = 2.0, fa[1] = 3.0, fa[2] = 6.0;  // norm 7
    fb[4] = -1.0;
    o.require(std::abs(single_frame_loss(fa, fb) - 8.0) <= 1e-12 * 8.0, "single-frame loss oracle");
    o.require(total_loss(2.0, 3.0, 0.5, 1.0, Mode::full_to_single) == 4.0, "weighted total loss oracle");
    o.note("similarity drift " + fmt("%.2e", inv) + ", 1000 ordered pairs, loss oracles exact");
    return o;
}

// ---------------------------------------------------------------- 8

// Overfitting harness: 64 training windows of 9 frames, width 32.
TrainConfig overfit_config() {
    TrainConfig c;
    c.model.T = 9;
    c.model.d_m = 32;
    c.model.d_f = 128;
    c.model.h = 4;
    c.model.N1 = 1;
    c.model.N2 = 0;
    c.model.s_m = {};
    c.model.mode = Mode::full;
    c.model.dropout = 0.0;
    c.epochs = 200;
    c.batch_size = 8;
    c.lr0 = 0.03;
    c.lr_decay = 0.98;
    c.seed = 1;
    c.flip_augment = false;
    c.eval_flip = false;
    return c;
}

Dataset overfit_data() {
    GenOptions g;
    g.seed = 7;
    g.sequences = 1;
    g.frames = 64;
    g.T = 9;
    return generate_dataset(g);
}

Outcome desk_learning() {
    Outcome o;
    constexpr double kThresholdMm = 1.0;
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset data = overfit_data();
    const TrainConfig cfg = overfit_config();
    const TrainResult r = train(cfg, data);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(!r.aborted, "run completes");
    const double best = r.log.epochs.empty() ? INFINITY : r.log.epochs[r.log.best_epoch].eval.mpjpe;
    o.require(data.samples.size() == 64, "64 training samples");
    o.require(best < kThresholdMm, "train MPJPE below " + fmt("%.1f mm", kThresholdMm));
    o.require(secs <= 1800.0, "runtime within 30 min");
    o.note("best train MPJPE " + fmt("%.3f mm", best) + " at epoch " + std::to_string(r.log.best_epoch) + " of " +
           std::to_string(cfg.epochs));
    return o;
}

// ---------------------------------------------------------------- 9

TrainConfig direction_config(Mode mode, std::uint64_t seed) {
    TrainConfig c;
    c.model.T = 27;
    c.model.d_m = 32;
    c.model.d_f = 64;
    c.model.h = 4;
    c.model.N1 = 2;
    c.model.N2 = 3;
    c.model.s_m = {3, 3, 3};
    c.model.mode = mode;
    c.epochs = 8;
    c.batch_size = 32;
    c.lr0 = 0.004;
    c.lr_decay = 0.95;
    c.seed = seed;
    return c;
}

Dataset direction_data(std::uint64_t seed, std::size_t sequences) {
    GenOptions g;
    g.seed = seed;
    g.sequences = sequences;
    g.frames = 100;
    g.T = 27;
    g.sigma_px = 5.0;
    return generate_dataset(g);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome full_to_single_direction() {
    Outcome o;
    const Dataset train_set = direction_data(101, 6);
    const Dataset held = direction_data(202, 2);
    std::vector<double> f2s, single;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (Mode m : {Mode::full_to_single, Mode::single}) {
            const TrainConfig cfg = direction_config(m, seed);
            const TrainResult r = train(cfg, train_set, &held);
            o.require(!r.aborted, std::string("run completes (") + mode_name(m) + ")");
            const double v = evaluate(cfg.model, r.best_params, held, cfg.eval_flip).mpjve;
            (m == Mode::single ? single : f2s).push_back(v);
        }
    }
    const double a = median(f2s), b = median(single);
    o.require(a < b, "median MPJVE full-to-single < single");
    o.note("median held-out MPJVE full-to-single " + fmt("%.3f", a) + " mm vs single " + fmt("%.3f", b) +
           " mm over 5 seeds");
    return o;
}

// ---------------------------------------------------------------- 10

Outcome determinism() {
    Outcome o;
    GenOptions g;
    g.seed = 55;
    g.sequences = 3;
    g.frames = 40;
    g.T = 9;
    g.sigma_px = 3.0;
    const std::string d1 = encode_dataset(generate_dataset(g));
    g.threads = 3;
    const std::string d2 = encode_dataset(generate_dataset(g));
    o.require(d1 == d2, "dataset bytes identical");

    const Dataset ds = decode_dataset(d1);
    TrainConfig c;
    c.model.T = 9;
    c.model.d_m = 16;
    c.model.d_f = 32;
    c.model.h = 2;
    c.model.N1 = 1;
    c.model.N2 = 2;
    c.model.s_m = {3, 3};
    c.epochs = 3;
    c.batch_size = 16;
    c.seed = 9;
    const TrainResult a = train(c, ds), b = train(c, ds);
    o.require(encode_checkpoint(c.model, a.best_params) == encode_checkpoint(c.model, b.best_params),
              "checkpoint bytes identical");
    std::ostringstream la, lb;
    write_run_log_csv(la, a.log);
    write_run_log_csv(lb, b.log);
    o.require(la.str() == lb.str(), "logs identical");
    o.note("dataset " + std::to_string(d1.size()) + " B, checkpoint and " + std::to_string(a.log.epochs.size()) +
           "-epoch log compared byte for byte");
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    for (int i = 1; i < argc; ++i) g_only.push_back(std::atoi(argv[i]));
    log::set_level(log::Level::quiet);
    run(1, "complexity reproduction", complexity_reproduction);
    run(2, "closed-form beta", beta_equivalence);
    run(3, "parameter count", parameter_count);
    run(4, "shape schedule", shape_schedule);
    run(5, "gradient integrity", gradient_integrity);
    run(6, "measured vs analytic MACs", measured_macs);
    run(7, "metric correctness", metric_correctness);
    run(8, "desk-scale learning", desk_learning);
    run(9, "full-to-single direction", full_to_single_direction);
    run(10, "determinism", determinism);
    std::printf("%d of %d criteria failed\n", g_failures, g_run);
    return g_failures == 0 ? 0 : 1;
}
