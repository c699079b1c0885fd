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

#include <functional>
#include <vector>

#include "numerics/tape.hpp"

namespace spose {

using ScalarFn = std::function<Var(Tape &, const std::vector<Var> &)>;

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_param = 0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    std::size_t coordinates = 0;
};

// Compares the tape's gradient of f at `params` against central differences.
// The per-coordinate error is |a - n| / max(1, |a|, |n|). `f` must be
// deterministic (fixed RNG state) and smooth at the sample point; ReLU and
// max-pool kinks are the caller's responsibility.
GradCheckResult grad_check(const ScalarFn &f, const std::vector<Grid> &params, double eps = 1e-5);

}  // namespace spose
