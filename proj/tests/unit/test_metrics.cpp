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

#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "metrics/losses.hpp"
#include "metrics/metrics.hpp"
#include "numerics/gradcheck.hpp"
#include "test_helpers.hpp"

using namespace spose;
using spose::testing::random_grid;

namespace {

using Mat3 = std::array<double, 9>;

// Rotation from a random unit quaternion.
Mat3 random_rotation(std::uint64_t seed) {
    RngStream r(seed);
    double q[4], n = 0.0;
    for (double &v : q) {
        v = r.normal();
        n += v * v;
    }
    n = std::sqrt(n);
    for (double &v : q) v /= n;
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
            2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
            2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

Grid transform(const Grid &g, const Mat3 &R, double scale, std::array<double, 3> t) {
    Grid out(g.shape());
    for (std::size_t i = 0; i < g.size(); i += 3)
        for (int a = 0; a < 3; ++a)
            out[i + a] = scale * (R[3 * a] * g[i] + R[3 * a + 1] * g[i + 1] + R[3 * a + 2] * g[i + 2]) + t[a];
    return out;
}

double loop_mpjpe(const Grid &a, const Grid &b) {
    double s = 0.0;
    const std::size_t n = a.size() / 3;
    for (std::size_t j = 0; j < n; ++j) {
        double d = 0.0;
        for (int c = 0; c < 3; ++c) d += (a[3 * j + c] - b[3 * j + c]) * (a[3 * j + c] - b[3 * j + c]);
        s += std::sqrt(d);
    }
    return s / static_cast<double>(n);
}

}  // namespace

TEST_CASE("sequence and single-frame losses") {
    const Grid y = random_grid({4, 5, 3}, 1, 100.0);
    CHECK(sequence_loss(y, y) == 0.0);
    Grid x = y;
    x[3 * 7] += 3.0;
    x[3 * 7 + 1] += 4.0;
    CHECK(sequence_loss(x, y) == doctest::Approx(5.0).epsilon(1e-12));

    Grid a({2, 3}), b({2, 3});
    a[2] = 1.0;
    a[4] = 2.0;
    CHECK(single_frame_loss(a, b) == 3.0);
    CHECK(single_frame_loss(b, b) == 0.0);

    const Grid p = random_grid({4, 5, 3}, 2, 100.0);
    CHECK(std::abs(sequence_loss(p, y) - loop_mpjpe(p, y) * 20.0) <= 1e-12 * sequence_loss(p, y));
    CHECK_THROWS_AS(sequence_loss(Grid({4, 5, 3}), Grid({4, 6, 3})), Error);
}

TEST_CASE("losses are non-negative and vanish only at equality") {
    for (int i = 0; i < 50; ++i) {
        const Grid a = random_grid({3, 2, 3}, 10 + i), b = random_grid({3, 2, 3}, 100 + i);
        CHECK(sequence_loss(a, b) > 0.0);
        CHECK(sequence_loss(a, a) == 0.0);
    }
}

TEST_CASE("sequence loss gradient away from zero residuals") {
    for (int i = 0; i < 20; ++i) {
        const Grid target = random_grid({2, 4, 3}, 40 + i);
        const ScalarFn f = [&](Tape &, const std::vector<Var> &p) { return sequence_loss(p[0], target); };
        CHECK(grad_check(f, {random_grid({2, 4, 3}, 70 + i)}).max_rel_error <= 1e-5);
    }
}

TEST_CASE("total loss and mode forcing") {
    CHECK(total_loss(2.0, 3.0, 1.0, 1.0, Mode::full_to_single) == 5.0);
    CHECK(total_loss(2.0, 3.0, 1.0, 1.0, Mode::single) == 3.0);
    CHECK(total_loss(2.0, 3.0, 1.0, 1.0, Mode::full) == 3.0);
    CHECK(total_loss(2.0, 3.0, 0.5, 2.0, Mode::single_to_single) == 7.0);
    const LossWeights w = effective_weights(1.0, 1.0, Mode::single);
    CHECK(w.first == 0.0);
    CHECK(w.second == 1.0);
    const LossWeights both = effective_weights(1.0, 1.0, Mode::full_to_single);
    CHECK(both.first == 1.0);
    CHECK(both.second == 1.0);
    CHECK_THROWS_AS(effective_weights(0.0, 0.0, Mode::full_to_single), Error);
    CHECK_THROWS_AS(effective_weights(1.0, 0.0, Mode::single), Error);
    CHECK_THROWS_AS(effective_weights(-1.0, 1.0, Mode::full_to_single), Error);
}

TEST_CASE("mpjpe") {
    const Grid gt = random_grid({2, 17, 3}, 3, 500.0);
    CHECK(mpjpe(gt, gt) == 0.0);
    Grid off = gt;
    for (std::size_t i = 0; i < off.size(); i += 3) {
        off[i + 1] += 3.0;
        off[i + 2] += 4.0;
    }
    CHECK(mpjpe(off, gt) == doctest::Approx(5.0).epsilon(1e-12));
    const Grid p = random_grid({2, 17, 3}, 4, 500.0);
    CHECK(std::abs(mpjpe(p, gt) - loop_mpjpe(p, gt)) <= 1e-9);
    CHECK_THROWS_AS(mpjpe(Grid({17, 3}), Grid({16, 3})), Error);
}

TEST_CASE("p-mpjpe is invariant to similarity transforms of the prediction") {
    for (int i = 0; i < 20; ++i) {
        const Grid gt = random_grid({17, 3}, 200 + i, 500.0);
        CHECK(p_mpjpe(gt, gt) <= 1e-9);
        const Grid pred = transform(gt, random_rotation(300 + i), 2.0, {10.0, -20.0, 30.0});
        CHECK(p_mpjpe(pred, gt) <= 1e-9);

        const Grid noisy = random_grid({17, 3}, 400 + i, 500.0);
        const double base = p_mpjpe(noisy, gt);
        const Grid moved = transform(noisy, random_rotation(500 + i), 0.7, {5.0, 6.0, -7.0});
        CHECK(std::abs(p_mpjpe(moved, gt) - base) <= 1e-9);
        const Mat3 R = random_rotation(600 + i);
        CHECK(std::abs(p_mpjpe(transform(noisy, R, 1.0, {1, 2, 3}), transform(gt, R, 1.0, {1, 2, 3})) - base) <=
              1e-9);
    }
}

TEST_CASE("p-mpjpe never exceeds mpjpe") {
    for (int i = 0; i < 1000; ++i) {
        const Grid gt = random_grid({17, 3}, 10000 + i, 500.0);
        const Grid pred = random_grid({17, 3}, 20000 + i, 500.0);
        CHECK(p_mpjpe(pred, gt) <= mpjpe(pred, gt) + 1e-9);
    }
}

TEST_CASE("reflections are not aligned away") {
    const Grid gt = random_grid({17, 3}, 7, 500.0);
    Grid mirrored = gt;
    for (std::size_t i = 0; i < mirrored.size(); i += 3) mirrored[i] = -mirrored[i];
    CHECK(p_mpjpe(mirrored, gt) > 1.0);
}

TEST_CASE("degenerate frames fall back to translation-only alignment") {
    const Grid gt = random_grid({17, 3}, 8, 500.0);
    const Grid point({17, 3}, 42.0);
    ProcrustesInfo info;
    const double e = p_mpjpe(point, gt, &info);
    CHECK(info.degenerate_frames == 1);
    CHECK(std::isfinite(e));
    // translation-only: centered prediction is all zeros, so the error is the
    // mean distance of gt joints from their centroid
    Grid centered = gt;
    double c[3] = {0, 0, 0};
    for (std::size_t j = 0; j < 17; ++j)
        for (int a = 0; a < 3; ++a) c[a] += gt[3 * j + a] / 17.0;
    for (std::size_t j = 0; j < 17; ++j)
        for (int a = 0; a < 3; ++a) centered[3 * j + a] = c[a];
    CHECK(e == doctest::Approx(mpjpe(centered, gt)).epsilon(1e-12));
}

TEST_CASE("procrustes alignment recovers a similarity copy") {
    const Grid gt = random_grid({17, 3}, 9, 500.0);
    const Grid pred = transform(gt, random_rotation(10), 0.5, {100, 0, 0});
    const Grid aligned = procrustes_align(pred, gt);
    CHECK(spose::testing::max_abs_diff(aligned, gt) <= 1e-8);
}

TEST_CASE("mpjve") {
    const Grid gt = random_grid({6, 17, 3}, 11, 500.0);
    Grid shifted = gt;
    for (std::size_t i = 0; i < shifted.size(); i += 3) shifted[i] += 12.5;
    CHECK(mpjve(shifted, gt) <= 1e-12);
    CHECK_THROWS_AS(mpjve(Grid({1, 17, 3}), Grid({1, 17, 3})), Error);

    const Grid pred = random_grid({6, 17, 3}, 12, 500.0);
    double s = 0.0;
    for (std::size_t f = 1; f < 6; ++f)
        for (std::size_t j = 0; j < 17; ++j) {
            double d = 0.0;
            for (int a = 0; a < 3; ++a) {
                const std::size_t k = (f * 17 + j) * 3 + a, km = ((f - 1) * 17 + j) * 3 + a;
                const double e = (pred[k] - pred[km]) - (gt[k] - gt[km]);
                d += e * e;
            }
            s += std::sqrt(d);
        }
    CHECK(mpjve(pred, gt) == doctest::Approx(s / 85.0).epsilon(1e-12));
}

TEST_CASE("metric report averages actions without weighting and writes CSV") {
    MetricReport r;
    r.per_action["Walk"] = {10.0, 8.0, 2.0, 100};
    r.per_action["Squat"] = {20.0, 12.0, 4.0, 10};
    r.finalize_average();
    CHECK(r.mpjpe == 15.0);
    CHECK(r.p_mpjpe == 10.0);
    CHECK(r.mpjve == 3.0);
    std::ostringstream os;
    write_metric_csv(os, r);
    const std::string csv = os.str();
    CHECK(csv.rfind("action,mpjpe,p_mpjpe,mpjve,frames\n", 0) == 0);
    CHECK(csv.find("Squat,20,12,4,10\n") != std::string::npos);
    CHECK(csv.find("Avg.,15,10,3,110\n") != std::string::npos);
}
