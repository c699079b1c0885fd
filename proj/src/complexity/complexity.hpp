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

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "model/config.hpp"

namespace spose {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Counting convention throughout: one multiply-accumulate is one FLOP.
// Projections, attention score / value products and (C)FFN matmuls are
// counted; norms, softmax, biases and activations are not.

struct ComplexityInput {
    std::uint64_t N = 3;  // layers per encoder
    std::uint64_t T = 27;
    std::uint64_t D = 256;  // d_m, with d_f = 2D
    std::uint64_t S = 3;
    std::uint64_t K = 3;

    void validate() const;
};

// One vanilla layer on length t: 8 t d^2 + 2 t^2 d.
Rational flops_vte_layer(const Rational &t, std::uint64_t d);
// One strided layer on length t: (6 + 2k/s) t d^2 + 2 t^2 d.
Rational flops_ste_layer(const Rational &t, std::uint64_t d, std::uint64_t s, std::uint64_t k);

// N (8 T D^2 + 2 T^2 D), exact.
BigInt flops_vte(const ComplexityInput &in);
// Sum over n of the strided layer cost at length T / S^(n-1), exact.
Rational flops_ste_exact(const ComplexityInput &in);
// Rounded to the nearest integer at the end.
BigInt flops_ste(const ComplexityInput &in);

struct CompressionRatio {
    Rational alpha;  // 2 F_VTE / (F_VTE + F_STE)
    Rational beta;   // F_STE / F_VTE
};
CompressionRatio compression_ratio(const ComplexityInput &in);

// (468 D + 91 T) / (972 D + 243 T); valid only for N = S = K = 3.
Rational beta_closed_form(std::uint64_t T, std::uint64_t D);

double to_double(const Rational &r);
double to_double(const BigInt &i);

struct ParamCount {
    std::size_t total = 0;
    // Keyed by module path: "embed", "pos", "vte.0", "ste.2", "head1", ...
    std::map<std::string, std::size_t> by_module;
};
ParamCount count_params(const ModelConfig &cfg);

struct LayerMacs {
    std::string scope;  // "vte.i" / "ste.n"
    std::size_t length = 0;
    std::size_t stride = 1;
    std::uint64_t measured = 0;
    Rational analytic;
};

// Runs one instrumented eval-mode forward pass (single sequence, random
// parameters and input) and pairs each encoder layer's counted MACs with the
// analytic per-layer cost for its actual input length and stride. The
// analytic cost uses d_f and k_f from the config, which reduces to the
// closed forms above when d_f = 2 d_m and k_f = 1.
std::vector<LayerMacs> measure_macs(const ModelConfig &cfg, std::uint64_t seed = 0);

struct ComplexityReport {
    ComplexityInput input;
    BigInt flops_vte;
    BigInt flops_ste;
    Rational alpha;
    Rational beta;
    std::size_t param_count = 0;
    std::vector<LayerMacs> measured;
};

ComplexityReport complexity_report(const ComplexityInput &in);
// Adds parameter count and measured MACs for a concrete model.
ComplexityReport complexity_report(const ComplexityInput &in, const ModelConfig &cfg);

void write_report_text(std::ostream &os, const ComplexityReport &r);
void write_report_csv(std::ostream &os, const ComplexityReport &r);

}  // namespace spose
