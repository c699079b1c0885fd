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

#include "synth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "numerics/rng.hpp"
#include "util/binary_io.hpp"

namespace spose {

void CameraSpec::validate() const {
    require(focal > 0.0, ErrorKind::config, "camera focal length must be positive");
    require(width > 0.0 && height > 0.0, ErrorKind::config, "image size must be positive");
}

CameraSpec CameraSpec::orbit(double yaw, double distance) {
    CameraSpec c;
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    c.rotation = {cy, 0, sy, 0, 1, 0, -sy, 0, cy};
    c.translation = {0, 0, distance};
    return c;
}

Vec3 CameraSpec::rotate(const Vec3 &v) const {
    const auto &r = rotation;
    return {r[0] * v[0] + r[1] * v[1] + r[2] * v[2], r[3] * v[0] + r[4] * v[1] + r[5] * v[2],
            r[6] * v[0] + r[7] * v[1] + r[8] * v[2]};
}

Vec3 CameraSpec::to_camera(const Vec3 &world) const {
    Vec3 p = rotate(world);
    for (int i = 0; i < 3; ++i) p[i] += translation[i];
    return p;
}

Grid project(const Grid &points, const CameraSpec &cam) {
    cam.validate();
    require(points.shape().back() == 3, ErrorKind::dimension, "project expects [..., 3] points");
    Shape out_shape = points.shape();
    out_shape.back() = 2;
    Grid out(out_shape);
    const std::size_t n = rows_of(points);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = points[i * 3], y = points[i * 3 + 1], z = points[i * 3 + 2];
        require(z > 0.0, ErrorKind::numeric, "project: point behind the camera (z <= 0)");
        const double u = cam.focal * x / z + cam.cx;
        const double v = cam.focal * y / z + cam.cy;
        out[i * 2] = 2.0 * u / cam.width - 1.0;
        out[i * 2 + 1] = 2.0 * v / cam.width - cam.height / cam.width;
    }
    return out;
}

Grid add_noise(const Grid &input2d, double sigma, std::uint64_t seed) {
    require(sigma >= 0.0, ErrorKind::config, "noise sigma must be non-negative");
    Grid out = input2d;
    if (sigma == 0.0) return out;
    RngStream rng(seed);
    for (auto &v : out.data()) v += sigma * rng.normal();
    return out;
}

Grid PoseSequenceSample::target3d_center() const {
    const std::size_t T = target3d_seq.dim(0), J = target3d_seq.dim(1);
    Grid c({J, 3});
    const std::size_t t = T / 2;
    for (std::size_t i = 0; i < J * 3; ++i) c[i] = target3d_seq[t * J * 3 + i];
    return c;
}

std::vector<PoseSequenceSample> window(const Grid &seq2d, const Grid &seq3d, std::size_t T,
                                       std::uint32_t sequence_id, const std::string &action) {
    require(T % 2 == 1, ErrorKind::config, "window length must be odd");
    require(seq2d.rank() == 3 && seq2d.dim(2) == 2, ErrorKind::dimension, "window expects 2D poses [F, J, 2]");
    require(seq3d.rank() == 3 && seq3d.dim(2) == 3, ErrorKind::dimension, "window expects 3D poses [F, J, 3]");
    require(seq2d.dim(0) == seq3d.dim(0) && seq2d.dim(1) == seq3d.dim(1), ErrorKind::dimension,
            "window: 2D and 3D sequences disagree in frames or joints");
    const std::size_t F = seq2d.dim(0), J = seq2d.dim(1);
    const long half = static_cast<long>(T / 2);
    std::vector<PoseSequenceSample> out;
    out.reserve(F);
    for (std::size_t f = 0; f < F; ++f) {
        PoseSequenceSample s;
        s.input2d = Grid({T, J, 2});
        s.target3d_seq = Grid({T, J, 3});
        s.sequence_id = sequence_id;
        s.frame_index = static_cast<std::uint32_t>(f);
        s.action = action;
        for (std::size_t t = 0; t < T; ++t) {
            const long src_l = std::clamp(static_cast<long>(f) + static_cast<long>(t) - half, 0L,
                                          static_cast<long>(F) - 1);
            const std::size_t src = static_cast<std::size_t>(src_l);
            for (std::size_t i = 0; i < J * 2; ++i) s.input2d[t * J * 2 + i] = seq2d[src * J * 2 + i];
            for (std::size_t i = 0; i < J * 3; ++i) s.target3d_seq[t * J * 3 + i] = seq3d[src * J * 3 + i];
        }
        out.push_back(std::move(s));
    }
    return out;
}

Grid flip_poses(const Grid &poses, const SkeletonSpec &spec) {
    require(poses.rank() >= 2, ErrorKind::dimension, "flip expects [..., J, C]");
    const std::size_t C = poses.shape().back();
    const std::size_t J = poses.shape()[poses.rank() - 2];
    require(J == spec.joints(), ErrorKind::dimension, "flip: joint count does not match the skeleton");
    const std::size_t frames = poses.size() / (J * C);
    Grid out(poses.shape());
    for (std::size_t f = 0; f < frames; ++f)
        for (std::size_t j = 0; j < J; ++j) {
            const std::size_t src = (f * J + spec.mirror[j]) * C;
            const std::size_t dst = (f * J + j) * C;
            for (std::size_t c = 0; c < C; ++c) out[dst + c] = poses[src + c];
            out[dst] = -out[dst];
        }
    return out;
}

PoseSequenceSample horizontal_flip(const PoseSequenceSample &sample, const SkeletonSpec &spec) {
    PoseSequenceSample s = sample;
    s.input2d = flip_poses(sample.input2d, spec);
    s.target3d_seq = flip_poses(sample.target3d_seq, spec);
    return s;
}

namespace {
constexpr std::string_view kDatasetMagic = "SPS1";
}

std::string encode_dataset(const Dataset &ds) {
    ByteWriter w;
    w.bytes(kDatasetMagic);
    w.u32(kDatasetVersion);
    w.u32(ds.J);
    w.u32(ds.T);
    w.u64(ds.samples.size());
    const Shape in_shape{ds.T, ds.J, 2}, out_shape{ds.T, ds.J, 3};
    for (const auto &s : ds.samples) {
        require(s.input2d.shape() == in_shape && s.target3d_seq.shape() == out_shape, ErrorKind::dimension,
                "dataset samples must share J and T");
        for (double v : s.input2d.data()) w.f32(static_cast<float>(v));
        for (double v : s.target3d_seq.data()) w.f32(static_cast<float>(v));
        w.u32(s.sequence_id);
        w.u32(s.frame_index);
        w.str(s.action);
    }
    w.seal();
    return w.buffer();
}

Dataset decode_dataset(std::string_view bytes) {
    ByteReader r(verify_sealed(bytes, "dataset"));
    if (r.bytes(4) != kDatasetMagic) fail(ErrorKind::io, "not a dataset file (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kDatasetVersion) fail(ErrorKind::io, "unsupported dataset version " + std::to_string(version));
    Dataset ds;
    ds.J = r.u32();
    ds.T = r.u32();
    require(ds.J > 0 && ds.T > 0, ErrorKind::io, "dataset header has zero J or T");
    const std::uint64_t count = r.u64();
    const std::size_t per_sample = static_cast<std::size_t>(ds.T) * ds.J * 5 * 4;
    require(count <= r.remaining() / per_sample, ErrorKind::checksum, "dataset sample count exceeds file size");
    ds.samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        PoseSequenceSample s;
        s.input2d = Grid({ds.T, ds.J, 2});
        s.target3d_seq = Grid({ds.T, ds.J, 3});
        for (auto &v : s.input2d.data()) v = r.f32();
        for (auto &v : s.target3d_seq.data()) v = r.f32();
        s.sequence_id = r.u32();
        s.frame_index = r.u32();
        s.action = r.str();
        ds.samples.push_back(std::move(s));
    }
    if (r.remaining() != 0) fail(ErrorKind::io, "trailing bytes in dataset");
    return ds;
}

void write_dataset(const Dataset &ds, const std::string &path) { write_file(path, encode_dataset(ds)); }

Dataset read_dataset(const std::string &path) { return decode_dataset(read_file(path)); }

namespace {

void round_to_float(Grid &g) {
    for (auto &v : g.data()) v = static_cast<double>(static_cast<float>(v));
}

std::vector<PoseSequenceSample> generate_sequence(const GenOptions &opt, const SkeletonSpec &spec,
                                                  std::uint32_t id) {
    const RngStream root(opt.seed);
    RngStream rng = root.fork(id);
    const std::uint64_t motion_seed = rng.next_u64();
    const std::uint64_t noise_seed = rng.next_u64();
    const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const CameraSpec cam = CameraSpec::orbit(yaw);

    const MotionClip clip = generate_motion(spec, motion_seed, opt.frames, opt.motion);
    const std::size_t F = opt.frames, J = spec.joints();
    Grid cam_points({F, J, 3});
    Grid rel3d({F, J, 3});
    for (std::size_t f = 0; f < F; ++f) {
        const Vec3 root_world{clip.root.at(f, 0), clip.root.at(f, 1), clip.root.at(f, 2)};
        for (std::size_t j = 0; j < J; ++j) {
            const Vec3 body{clip.joints.at(f, j, 0), clip.joints.at(f, j, 1), clip.joints.at(f, j, 2)};
            const Vec3 world{root_world[0] + body[0], root_world[1] + body[1], root_world[2] + body[2]};
            const Vec3 pc = cam.to_camera(world);
            const Vec3 rel = cam.rotate(body);
            for (int c = 0; c < 3; ++c) {
                cam_points.at(f, j, c) = pc[c];
                rel3d.at(f, j, c) = rel[c];
            }
        }
    }
    Grid seq2d = add_noise(project(cam_points, cam), opt.sigma_px * 2.0 / cam.width, noise_seed);
    round_to_float(seq2d);
    round_to_float(rel3d);
    return window(seq2d, rel3d, opt.T, id, clip.action);
}

}  // namespace

Dataset generate_dataset(const GenOptions &opt, const SkeletonSpec &spec) {
    spec.validate();
    require(opt.sequences >= 1 && opt.frames >= 1, ErrorKind::config, "need at least one sequence and frame");
    require(opt.sigma_px >= 0.0, ErrorKind::config, "sigma must be non-negative");
    Dataset ds;
    ds.J = static_cast<std::uint32_t>(spec.joints());
    ds.T = static_cast<std::uint32_t>(opt.T);
    std::vector<std::vector<PoseSequenceSample>> shards(opt.sequences);
    const std::size_t workers = std::clamp<std::size_t>(opt.threads, 1, opt.sequences);
    if (workers == 1) {
        for (std::size_t s = 0; s < opt.sequences; ++s)
            shards[s] = generate_sequence(opt, spec, static_cast<std::uint32_t>(s));
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t s = w; s < opt.sequences; s += workers)
                        shards[s] = generate_sequence(opt, spec, static_cast<std::uint32_t>(s));
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto &t : pool) t.join();
        for (auto &e : errors)
            if (e) std::rethrow_exception(e);
    }
    for (auto &shard : shards)
        for (auto &s : shard) ds.samples.push_back(std::move(s));
    return ds;
}

}  // namespace spose
