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

#include "synth/motion.hpp"

#include <cmath>
#include <numbers>

#include "numerics/rng.hpp"

namespace spose {

namespace {

using Mat3 = std::array<double, 9>;

Mat3 mat_mul(const Mat3 &a, const Mat3 &b) {
    Mat3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
    return c;
}

Vec3 mat_vec(const Mat3 &a, const Vec3 &v) {
    return {a[0] * v[0] + a[1] * v[1] + a[2] * v[2], a[3] * v[0] + a[4] * v[1] + a[5] * v[2],
            a[6] * v[0] + a[7] * v[1] + a[8] * v[2]};
}

// R = Rz(c) * Ry(b) * Rx(a)
Mat3 euler(double a, double b, double c) {
    const double ca = std::cos(a), sa = std::sin(a);
    const double cb = std::cos(b), sb = std::sin(b);
    const double cc = std::cos(c), sc = std::sin(c);
    const Mat3 rx{1, 0, 0, 0, ca, -sa, 0, sa, ca};
    const Mat3 ry{cb, 0, sb, 0, 1, 0, -sb, 0, cb};
    const Mat3 rz{cc, -sc, 0, sc, cc, 0, 0, 0, 1};
    return mat_mul(rz, mat_mul(ry, rx));
}

constexpr double kMinFrequency = 0.1;  // Hz
// Heading and ground drift of the root move slower than the limbs.
constexpr double kRootMaxFrequency = 0.25;  // Hz

struct Wave {
    double amp, freq, phase;
};

// Amplitude (rad) for each local axis of a joint under an action profile.
Vec3 joint_amplitude(const std::string &action, std::size_t joint) {
    const bool hip = joint == 1 || joint == 4;
    const bool knee = joint == 2 || joint == 5;
    const bool shoulder = joint == 11 || joint == 14;
    const bool elbow = joint == 12 || joint == 15;
    const bool spine = joint == 7 || joint == 8 || joint == 9;
    if (action == "Walk") {
        if (hip) return {0.3, 0.05, 0.05};
        if (knee) return {0.28, 0.0, 0.0};
        if (shoulder) return {0.25, 0.05, 0.1};
        if (elbow) return {0.2, 0.0, 0.0};
        if (spine) return {0.04, 0.08, 0.04};
    } else if (action == "Wave") {
        if (joint == 11) return {0.3, 0.2, 0.45};
        if (joint == 12) return {0.1, 0.3, 0.5};
        if (shoulder || elbow) return {0.1, 0.05, 0.1};
        if (hip || knee) return {0.05, 0.02, 0.02};
        if (spine) return {0.05, 0.1, 0.05};
    } else if (action == "Squat") {
        if (hip) return {0.3, 0.02, 0.05};
        if (knee) return {0.3, 0.0, 0.0};
        if (spine) return {0.1, 0.03, 0.03};
        if (shoulder) return {0.2, 0.05, 0.1};
        if (elbow) return {0.15, 0.0, 0.0};
    } else {  // Stretch
        if (shoulder) return {0.3, 0.2, 0.35};
        if (elbow) return {0.3, 0.1, 0.1};
        if (spine) return {0.12, 0.12, 0.12};
        if (hip) return {0.15, 0.05, 0.1};
        if (knee) return {0.15, 0.0, 0.0};
    }
    return {0.03, 0.03, 0.03};
}

std::vector<Wave> draw_waves(RngStream &rng, double amp, const MotionOptions &opt, double max_frequency) {
    std::vector<Wave> w(opt.sinusoids);
    // Weights fall off as 1/f, so fast components stay small. The amplitudes
    // are then scaled so their sum never exceeds `amp`.
    double total = 0.0;
    for (auto &x : w) {
        x.freq = rng.uniform(kMinFrequency, max_frequency);
        x.amp = rng.uniform(0.2, 1.0) / x.freq;
        x.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        total += x.amp;
    }
    for (auto &x : w) x.amp *= amp * opt.amplitude_scale / total;
    return w;
}

double eval_waves(const std::vector<Wave> &w, double t) {
    double s = 0.0;
    for (const auto &x : w) s += x.amp * std::sin(2.0 * std::numbers::pi * x.freq * t + x.phase);
    return s;
}

}  // namespace

const std::vector<std::string> &motion_actions() {
    static const std::vector<std::string> actions{"Squat", "Stretch", "Walk", "Wave"};
    return actions;
}

MotionClip generate_motion(const SkeletonSpec &spec, std::uint64_t seed, std::size_t frames,
                           const MotionOptions &opt) {
    spec.validate();
    require(frames >= 1, ErrorKind::config, "motion needs at least one frame");
    require(opt.sinusoids >= 1 && opt.sinusoids <= 5, ErrorKind::config, "use 1 to 5 sinusoids per angle");
    require(opt.max_frequency > 0.1 && opt.max_frequency <= 2.0, ErrorKind::config,
            "max frequency must lie in (0.1, 2] Hz");
    require(opt.hz > 0.0, ErrorKind::config, "frame rate must be positive");
    require(opt.amplitude_scale >= 0.0, ErrorKind::config, "amplitude scale must be non-negative");

    RngStream rng(seed);
    MotionClip clip;
    clip.action = opt.action.empty() ? motion_actions()[rng.below(motion_actions().size())] : opt.action;

    const std::size_t J = spec.joints();
    std::vector<std::array<std::vector<Wave>, 3>> waves(J);
    for (std::size_t j = 0; j < J; ++j) {
        const Vec3 amp = joint_amplitude(clip.action, j);
        for (int a = 0; a < 3; ++a) waves[j][a] = draw_waves(rng, amp[a], opt, opt.max_frequency);
    }
    // Root: slow heading change plus slight lean, and a gentle drift in the
    // ground plane.
    const double base_heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const auto heading = draw_waves(rng, 0.6, opt, kRootMaxFrequency);
    const auto lean = draw_waves(rng, 0.08, opt, kRootMaxFrequency);
    const auto drift_x = draw_waves(rng, 300.0, opt, kRootMaxFrequency);
    const auto drift_z = draw_waves(rng, 300.0, opt, kRootMaxFrequency);

    clip.joints = Grid({frames, J, 3});
    clip.root = Grid({frames, 3});
    std::vector<Mat3> global(J);
    std::vector<Vec3> pos(J);
    for (std::size_t f = 0; f < frames; ++f) {
        const double t = static_cast<double>(f) / opt.hz;
        const Mat3 root_rot = euler(eval_waves(lean, t), base_heading + eval_waves(heading, t), 0.0);
        global[0] = mat_mul(root_rot, euler(eval_waves(waves[0][0], t), eval_waves(waves[0][1], t),
                                            eval_waves(waves[0][2], t)));
        pos[0] = {0.0, 0.0, 0.0};
        for (std::size_t j = 1; j < J; ++j) {
            const std::size_t p = spec.parent[j];
            Vec3 bone = spec.rest_direction[j];
            for (auto &c : bone) c *= spec.bone_length[j];
            const Vec3 off = mat_vec(global[p], bone);
            for (int c = 0; c < 3; ++c) pos[j][c] = pos[p][c] + off[c];
            const Mat3 local =
                euler(eval_waves(waves[j][0], t), eval_waves(waves[j][1], t), eval_waves(waves[j][2], t));
            global[j] = mat_mul(global[p], local);
        }
        for (std::size_t j = 0; j < J; ++j)
            for (int c = 0; c < 3; ++c) clip.joints.at(f, j, c) = pos[j][c];
        clip.root.at(f, 0) = eval_waves(drift_x, t);
        clip.root.at(f, 1) = 0.0;
        clip.root.at(f, 2) = eval_waves(drift_z, t);
    }
    return clip;
}

}  // namespace spose
