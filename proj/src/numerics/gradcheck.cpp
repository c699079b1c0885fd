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

#include "numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spose {

namespace {

std::string leaf_path(std::size_t i) { return "p" + std::to_string(i); }

double evaluate(const ScalarFn &f, const std::vector<Grid> &params) {
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) leaves.push_back(tape.constant(params[i]));
    Var out = f(tape, leaves);
    require(out.value().size() == 1, ErrorKind::dimension, "grad_check: function must be scalar-valued");
    return out.value()[0];
}

}  // namespace

GradCheckResult grad_check(const ScalarFn &f, const std::vector<Grid> &params, double eps) {
    Gradients analytic;
    {
        Tape tape;
        std::vector<Var> leaves;
        for (std::size_t i = 0; i < params.size(); ++i) leaves.push_back(tape.parameter(leaf_path(i), params[i]));
        Var out = f(tape, leaves);
        analytic = tape.backward(out);
    }

    GradCheckResult result;
    std::vector<Grid> probe = params;
    for (std::size_t p = 0; p < params.size(); ++p) {
        const Grid &g = analytic.at(leaf_path(p));
        for (std::size_t i = 0; i < params[p].size(); ++i) {
            const double orig = params[p][i];
            probe[p][i] = orig + eps;
            const double up = evaluate(f, probe);
            probe[p][i] = orig - eps;
            const double down = evaluate(f, probe);
            probe[p][i] = orig;
            const double numeric = (up - down) / (2.0 * eps);
            const double a = g[i];
            const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
            ++result.coordinates;
            if (err > result.max_rel_error || result.coordinates == 1) {
                result.max_rel_error = err;
                result.worst_param = p;
                result.worst_index = i;
                result.analytic = a;
                result.numeric = numeric;
            }
        }
    }
    return result;
}

}  // namespace spose
