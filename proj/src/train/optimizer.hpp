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

#include <cstdint>
#include <map>
#include <string>

#include "model/params.hpp"
#include "numerics/tape.hpp"

namespace spose {

// Adam with the AMSGrad correction: the denominator uses the running
// maximum of the second-moment estimate, so effective step sizes never grow.
class AmsGrad {
   public:
    AmsGrad(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    // Parameters missing from `grads` are treated as having zero gradient.
    void step(ParameterSet &params, const Gradients &grads, double lr);

    std::uint64_t steps() const { return t_; }

   private:
    struct Slot {
        Grid m, v, v_max;
    };
    double beta1_, beta2_, eps_;
    std::uint64_t t_ = 0;
    std::map<std::string, Slot> slots_;
};

}  // namespace spose
