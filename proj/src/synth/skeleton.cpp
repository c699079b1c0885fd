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

#include "synth/skeleton.hpp"

#include <cmath>

#include "numerics/error.hpp"

namespace spose {

void SkeletonSpec::validate() const {
    const std::size_t n = parent.size();
    require(n >= 1, ErrorKind::config, "skeleton needs at least one joint");
    require(bone_length.size() == n && rest_direction.size() == n && mirror.size() == n, ErrorKind::config,
            "skeleton tables have inconsistent lengths");
    require(parent[0] == 0, ErrorKind::config, "joint 0 must be the root");
    for (std::size_t j = 1; j < n; ++j) {
        require(parent[j] < j, ErrorKind::config, "joint " + std::to_string(j) + " must follow its parent");
        require(bone_length[j] > 0.0, ErrorKind::config, "bone lengths must be positive");
        const Vec3 &d = rest_direction[j];
        require(std::abs(std::hypot(d[0], d[1], d[2]) - 1.0) < 1e-12, ErrorKind::config,
                "rest directions must be unit vectors");
    }
    for (std::size_t j = 0; j < n; ++j) {
        require(mirror[j] < n && mirror[mirror[j]] == j, ErrorKind::config,
                "mirror table must pair every joint with exactly one partner");
    }
}

SkeletonSpec SkeletonSpec::human17() {
    SkeletonSpec s;
    s.parent = {0, 0, 1, 2, 0, 4, 5, 0, 7, 8, 9, 8, 11, 12, 8, 14, 15};
    s.bone_length = {0, 130, 450, 450, 130, 450, 450, 230, 250, 110, 115, 150, 280, 250, 150, 280, 250};
    const Vec3 left{1, 0, 0}, right{-1, 0, 0}, down{0, 1, 0}, up{0, -1, 0};
    s.rest_direction = {Vec3{0, 0, 0}, right, down, down, left, down, down, up, up, up, up,
                        left, down, down, right, down, down};
    s.mirror = {0, 4, 5, 6, 1, 2, 3, 7, 8, 9, 10, 14, 15, 16, 11, 12, 13};
    return s;
}

}  // namespace spose
