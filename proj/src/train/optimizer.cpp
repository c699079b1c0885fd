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

#include "train/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace spose {

AmsGrad::AmsGrad(double beta1, double beta2, double eps) : beta1_(beta1), beta2_(beta2), eps_(eps) {
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, ErrorKind::config,
            "AMSGrad betas must lie in [0, 1)");
    require(eps > 0.0, ErrorKind::config, "AMSGrad eps must be positive");
}

void AmsGrad::step(ParameterSet &params, const Gradients &grads, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const double step_size = lr / bc1;
    const double sqrt_bc2 = std::sqrt(bc2);
    for (auto &[path, value] : params.values) {
        auto [it, fresh] = slots_.try_emplace(path);
        Slot &s = it->second;
        if (fresh) s = {Grid(value.shape()), Grid(value.shape()), Grid(value.shape())};
        auto g_it = grads.find(path);
        const Grid *g = g_it == grads.end() ? nullptr : &g_it->second;
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double gi = g ? (*g)[i] : 0.0;
            s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * gi;
            s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * gi * gi;
            s.v_max[i] = std::max(s.v_max[i], s.v[i]);
            const double denom = std::sqrt(s.v_max[i]) / sqrt_bc2 + eps_;
            value[i] -= step_size * s.m[i] / denom;
        }
    }
}

}  // namespace spose
