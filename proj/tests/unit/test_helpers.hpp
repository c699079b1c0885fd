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

#include <cmath>
#include <cstdint>

#include "numerics/grid.hpp"
#include "numerics/rng.hpp"

namespace spose::testing {

inline Grid random_grid(Shape shape, std::uint64_t seed, double scale = 1.0) {
    Grid g(std::move(shape));
    RngStream rng(seed);
    for (double &v : g.data()) v = scale * rng.uniform(-1.0, 1.0);
    return g;
}

inline double max_abs_diff(const Grid &a, const Grid &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace spose::testing
