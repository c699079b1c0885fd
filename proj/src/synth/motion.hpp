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
#include <string>
#include <vector>

#include "numerics/grid.hpp"
#include "synth/skeleton.hpp"

namespace spose {

struct MotionOptions {
    double hz = 50.0;
    std::size_t sinusoids = 3;   // per joint angle, at most 5
    double max_frequency = 1.0;  // Hz, at most 2
    double amplitude_scale = 1.0;
    // Empty: pick one of motion_actions() from the seed.
    std::string action;
};

const std::vector<std::string> &motion_actions();

struct MotionClip {
    Grid joints;  // [F, J, 3] mm, root at the origin, body orientation applied
    Grid root;    // [F, 3] mm, world position of the root
    std::string action;
};

// Each joint's three local angles (and the root's heading) follow a sum of
// sinusoids with random phase and frequency; positions come from forward
// kinematics, so bone lengths hold exactly in every frame. With the default
// options no joint moves more than 40 mm between frames at 50 Hz; raising
// max_frequency or amplitude_scale loosens that.
MotionClip generate_motion(const SkeletonSpec &spec, std::uint64_t seed, std::size_t frames,
                           const MotionOptions &opt = {});

}  // namespace spose
