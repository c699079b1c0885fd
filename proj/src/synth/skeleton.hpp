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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace spose {

using Vec3 = std::array<double, 3>;

// Kinematic tree. Coordinates are x right, y down, z away from the viewer.
struct SkeletonSpec {
    std::vector<std::size_t> parent;  // parent[0] == 0 (root is its own parent)
    std::vector<double> bone_length;  // mm from parent; 0 for the root
    std::vector<Vec3> rest_direction;  // unit bone direction in the rest pose
    std::vector<std::size_t> mirror;   // left/right partner; self for center joints

    std::size_t joints() const { return parent.size(); }

    // Tree rooted at 0, parents precede children, mirror is an involution
    // pairing left and right joints.
    void validate() const;

    // 17-joint layout following the Human3.6M ordering:
    // hip, r-hip, r-knee, r-foot, l-hip, l-knee, l-foot, spine, thorax,
    // neck, head, l-shoulder, l-elbow, l-wrist, r-shoulder, r-elbow, r-wrist.
    static SkeletonSpec human17();
};

inline constexpr std::uint32_t kSkeletonTableVersion = 1;

}  // namespace spose
