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
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "numerics/grid.hpp"
#include "synth/motion.hpp"
#include "synth/skeleton.hpp"

namespace spose {

struct CameraSpec {
    double focal = 1145.0;  // px
    double cx = 500.0;      // px
    double cy = 500.0;
    double width = 1000.0;  // px; normalization divides by width / 2
    double height = 1000.0;
    std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};  // camera-from-world
    std::array<double, 3> translation{0, 0, 4500};              // mm

    void validate() const;
    // Camera frame looking at the world origin from `distance` mm, turned by
    // `yaw` about the vertical axis.
    static CameraSpec orbit(double yaw, double distance = 4500.0);

    Vec3 to_camera(const Vec3 &world) const;
    Vec3 rotate(const Vec3 &v) const;
};

// Pinhole projection of [..., 3] camera-frame points to [..., 2], mapped to
// normalized coordinates u' = 2u / w - 1, v' = 2v / w - h / w. Points must
// have positive depth.
Grid project(const Grid &points_camera, const CameraSpec &cam);

// i.i.d. N(0, sigma^2) added to every coordinate.
Grid add_noise(const Grid &input2d, double sigma, std::uint64_t seed);

struct PoseSequenceSample {
    Grid input2d;        // [T, J, 2]
    Grid target3d_seq;   // [T, J, 3] root-relative mm
    std::uint32_t sequence_id = 0;
    std::uint32_t frame_index = 0;
    std::string action;

    // Frame T/2 of target3d_seq.
    Grid target3d_center() const;

    bool operator==(const PoseSequenceSample &) const = default;
};

// One window of length T (odd) centered on every frame; frames outside the
// clip replicate the nearest edge frame.
std::vector<PoseSequenceSample> window(const Grid &seq2d, const Grid &seq3d, std::size_t T,
                                       std::uint32_t sequence_id, const std::string &action);

// Negates x in 2D and 3D and swaps each left/right joint pair.
PoseSequenceSample horizontal_flip(const PoseSequenceSample &sample, const SkeletonSpec &spec);
// Same operation on a bare [..., J, C] pose array.
Grid flip_poses(const Grid &poses, const SkeletonSpec &spec);

struct Dataset {
    std::uint32_t J = 17;
    std::uint32_t T = 27;
    std::vector<PoseSequenceSample> samples;

    bool operator==(const Dataset &) const = default;
};

// "SPS1" | u32 version (=1) | u32 J | u32 T | u64 count
// | count x (f32 input2d[T*J*2] | f32 target3d_seq[T*J*3]
//            | u32 sequence_id | u32 frame_index | u32 len | action bytes)
// | u64 FNV-1a checksum. All little-endian.
inline constexpr std::uint32_t kDatasetVersion = 1;

std::string encode_dataset(const Dataset &ds);
Dataset decode_dataset(std::string_view bytes);
void write_dataset(const Dataset &ds, const std::string &path);
Dataset read_dataset(const std::string &path);

struct GenOptions {
    std::uint64_t seed = 0;
    std::size_t sequences = 8;
    std::size_t frames = 200;  // per sequence
    std::size_t T = 27;
    double sigma_px = 0.0;     // 2D noise std-dev in pixels
    MotionOptions motion;
    std::size_t threads = 1;   // sequences are generated in independent shards
};

// Motion -> camera -> projection -> noise -> windows. Values are rounded to
// float so a written dataset reads back exactly. A pure function of the
// options (thread count included or not).
Dataset generate_dataset(const GenOptions &opt, const SkeletonSpec &spec = SkeletonSpec::human17());

}  // namespace spose
