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

#include "model/config.hpp"
#include "numerics/tape.hpp"

namespace spose {

// Sum over frames and joints of the Euclidean joint error. Shapes [T, J, 3]
// (or any shape ending in 3; every leading index is summed).
double sequence_loss(const Grid &pred, const Grid &gt);
Var sequence_loss(Var pred, const Grid &gt);

// Same sum for a single target frame [J, 3].
double single_frame_loss(const Grid &pred, const Grid &gt);
Var single_frame_loss(Var pred, const Grid &gt);

struct LossWeights {
    double first = 0.0;   // intermediate head
    double second = 0.0;  // final head
};

// `full` and `single` supervise only the final head, so the intermediate
// weight is forced to zero. Both weights zero is a config error.
LossWeights effective_weights(double lambda_f, double lambda_s, Mode mode);

// lambda_f * first + lambda_s * second after the mode's forcing rules.
double total_loss(double first, double second, double lambda_f, double lambda_s, Mode mode);

}  // namespace spose
