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

#include <cmath>
#include <functional>

#include "metrics/losses.hpp"
#include "model/model.hpp"
#include "numerics/gradcheck.hpp"
#include "test_helpers.hpp"

using namespace spose;
using spose::testing::random_grid;

namespace {

constexpr int kInstances = 20;
constexpr double kTol = 1e-5;

// Reduces an op output to a scalar with fixed random weights so every output
// coordinate contributes a distinct gradient.
Var weighted_sum(Tape &t, Var y, std::uint64_t seed) {
    return ag::sum(ag::mul(y, t.constant(random_grid(y.shape(), seed))));
}

// Values bounded away from zero so ReLU / norm kinks are never hit.
Grid away_from_zero(Shape s, std::uint64_t seed) {
    Grid g = random_grid(std::move(s), seed);
    for (double &v : g.data()) v = v >= 0 ? 0.1 + v : -0.1 + v;
    return g;
}

void check_op(const char *name, const std::function<std::vector<Grid>(std::uint64_t)> &make,
              const std::function<Var(Tape &, const std::vector<Var> &)> &op) {
    double worst = 0.0;
    for (int i = 0; i < kInstances; ++i) {
        const std::uint64_t seed = 1000 * (i + 1);
        const ScalarFn f = [&](Tape &t, const std::vector<Var> &p) { return weighted_sum(t, op(t, p), seed + 999); };
        const GradCheckResult r = grad_check(f, make(seed));
        worst = std::max(worst, r.max_rel_error);
    }
    INFO(name << " worst relative error " << worst);
    CHECK(worst <= kTol);
}

}  // namespace

TEST_CASE("sum of squares has gradient 2x exactly") {
    Tape t;
    const Grid x = random_grid({3, 4}, 1);
    Var p = t.parameter("x", x);
    Var unused = t.parameter("unused", Grid({2}, 1.0));
    (void)unused;
    const Gradients g = t.backward(ag::sum(ag::square(p)));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(g.at("x")[i] == 2.0 * x[i]);
    CHECK(g.at("unused") == Grid({2}, 0.0));
}

TEST_CASE("tape rejects foreign inputs and non-scalar losses") {
    Tape a, b;
    Var x = a.parameter("x", Grid({2}, 1.0));
    CHECK_THROWS_AS(ag::add(x, b.constant(Grid({2}, 1.0))), Error);
    CHECK_THROWS_AS(a.backward(x), Error);
    CHECK_THROWS_AS(b.backward(x), Error);
}

TEST_CASE("reverse order is a valid topological order") {
    // Every input id precedes its consumer, so any recorded graph is acyclic.
    Tape t;
    Var x = t.parameter("x", Grid({1}, 3.0));
    Var y = ag::mul(x, x);
    Var z = ag::add(y, x);
    CHECK(x.id() < y.id());
    CHECK(y.id() < z.id());
    CHECK(t.backward(z).at("x")[0] == doctest::Approx(7.0));
}

TEST_CASE("linear layer grad check is tight") {
    double worst = 0.0;
    for (int i = 0; i < kInstances; ++i) {
        const std::uint64_t s = 50 + i;
        const ScalarFn f = [&](Tape &t, const std::vector<Var> &p) {
            return weighted_sum(t, ag::linear(p[0], p[1], p[2]), s + 7);
        };
        worst = std::max(worst, grad_check(f, {random_grid({4, 5}, s), random_grid({5, 3}, s + 1),
                                               random_grid({3}, s + 2)}).max_rel_error);
    }
    CHECK(worst <= 1e-7);
}

TEST_CASE("elementwise ops pass grad check") {
    auto two = [](Shape s) {
        return [s](std::uint64_t seed) { return std::vector<Grid>{random_grid(s, seed), random_grid(s, seed + 1)}; };
    };
    check_op("add", two({3, 4}), [](Tape &, const std::vector<Var> &p) { return ag::add(p[0], p[1]); });
    check_op("sub", two({3, 4}), [](Tape &, const std::vector<Var> &p) { return ag::sub(p[0], p[1]); });
    check_op("mul", two({3, 4}), [](Tape &, const std::vector<Var> &p) { return ag::mul(p[0], p[1]); });
    auto one = [](std::uint64_t seed) { return std::vector<Grid>{away_from_zero({2, 5}, seed)}; };
    check_op("scale", one, [](Tape &, const std::vector<Var> &p) { return ag::scale(p[0], -1.7); });
    check_op("square", one, [](Tape &, const std::vector<Var> &p) { return ag::square(p[0]); });
    check_op("relu", one, [](Tape &, const std::vector<Var> &p) { return ag::relu(p[0]); });
    check_op("reshape", one, [](Tape &, const std::vector<Var> &p) { return ag::reshape(p[0], {5, 2}); });
    check_op("sum", one, [](Tape &, const std::vector<Var> &p) { return ag::sum(p[0]); });
}

TEST_CASE("sequence ops pass grad check") {
    check_op(
        "add_table",
        [](std::uint64_t s) { return std::vector<Grid>{random_grid({2, 4, 3}, s), random_grid({4, 3}, s + 1)}; },
        [](Tape &, const std::vector<Var> &p) { return ag::add_table(p[0], p[1]); });
    check_op(
        "take_frame", [](std::uint64_t s) { return std::vector<Grid>{random_grid({2, 5, 3, 2}, s)}; },
        [](Tape &, const std::vector<Var> &p) { return ag::take_frame(p[0], 2); });
    check_op(
        "conv1d_strided",
        [](std::uint64_t s) {
            return std::vector<Grid>{random_grid({2, 10, 3}, s), random_grid({3, 3, 4}, s + 1),
                                     random_grid({4}, s + 2)};
        },
        [](Tape &, const std::vector<Var> &p) { return ag::conv1d_strided(p[0], p[1], p[2], 3); });
    check_op(
        "conv1d_strided k=5 s=2",
        [](std::uint64_t s) {
            return std::vector<Grid>{random_grid({1, 7, 2}, s), random_grid({5, 2, 3}, s + 1),
                                     random_grid({3}, s + 2)};
        },
        [](Tape &, const std::vector<Var> &p) { return ag::conv1d_strided(p[0], p[1], p[2], 2); });
    check_op(
        "maxpool1d",
        [](std::uint64_t s) {
            // distinct values spaced well beyond eps so the argmax is stable
            Grid g({2, 7, 3});
            RngStream r(s);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.01 * static_cast<double>(i);
            for (std::size_t i = g.size(); i > 1; --i) std::swap(g[i - 1], g[r.below(i)]);
            return std::vector<Grid>{g};
        },
        [](Tape &, const std::vector<Var> &p) { return ag::maxpool1d(p[0], 3); });
    check_op(
        "softmax", [](std::uint64_t s) { return std::vector<Grid>{random_grid({3, 5}, s, 2.0)}; },
        [](Tape &, const std::vector<Var> &p) { return ag::softmax(p[0], 1); });
    check_op(
        "softmax axis 0", [](std::uint64_t s) { return std::vector<Grid>{random_grid({3, 5}, s, 2.0)}; },
        [](Tape &, const std::vector<Var> &p) { return ag::softmax(p[0], 0); });
}

TEST_CASE("normalization ops pass grad check") {
    auto norm_args = [](std::uint64_t s) {
        return std::vector<Grid>{random_grid({2, 4, 5}, s, 2.0), random_grid({5}, s + 1), random_grid({5}, s + 2)};
    };
    check_op("layer_norm", norm_args,
             [](Tape &, const std::vector<Var> &p) { return ag::layer_norm(p[0], p[1], p[2]); });
    check_op("batch_norm_train", norm_args, [](Tape &, const std::vector<Var> &p) {
        static thread_local kernels::BatchNormStats stats;
        stats = kernels::BatchNormStats::fresh(5);
        return ag::batch_norm_train(p[0], p[1], p[2], stats);
    });
    check_op("batch_norm_eval", norm_args, [](Tape &, const std::vector<Var> &p) {
        kernels::BatchNormStats stats{random_grid({5}, 3), Grid({5}, 0.7), true};
        return ag::batch_norm_eval(p[0], p[1], p[2], stats);
    });
}

TEST_CASE("dropout, attention and the joint loss pass grad check") {
    check_op(
        "dropout", [](std::uint64_t s) { return std::vector<Grid>{random_grid({4, 6}, s)}; },
        [](Tape &, const std::vector<Var> &p) {
            RngStream rng(77);  // same mask on every evaluation
            return ag::dropout(p[0], 0.3, rng, true);
        });
    check_op(
        "attention",
        [](std::uint64_t s) {
            return std::vector<Grid>{random_grid({2, 5, 4}, s), random_grid({2, 5, 4}, s + 1),
                                     random_grid({2, 5, 4}, s + 2)};
        },
        [](Tape &, const std::vector<Var> &p) { return ag::attention(p[0], p[1], p[2], 2); });

    double worst = 0.0;
    for (int i = 0; i < kInstances; ++i) {
        const Grid target = random_grid({3, 4, 3}, 500 + i);
        const ScalarFn f = [&](Tape &, const std::vector<Var> &p) { return ag::l2_norm_sum(p[0], target); };
        worst = std::max(worst, grad_check(f, {random_grid({3, 4, 3}, 600 + i)}).max_rel_error);
    }
    CHECK(worst <= kTol);
}

TEST_CASE("joint loss gradient at a zero residual is zero") {
    Tape t;
    const Grid target = random_grid({2, 3}, 9);
    Var p = t.parameter("p", target);
    const Gradients g = t.backward(ag::l2_norm_sum(p, target));
    CHECK(g.at("p") == Grid({2, 3}, 0.0));
}

namespace {

// Central differences over parameter-set entries for a whole network.
double model_grad_error(const ModelConfig &cfg, std::size_t B, std::uint64_t seed, std::size_t probes_per_param) {
    const ParameterSet base = init_params(cfg, seed);
    const Grid input = random_grid({B, cfg.T, cfg.J, 2}, seed + 1, 0.5);
    const Grid target_seq = random_grid({B, cfg.T, cfg.J, 3}, seed + 2, 0.5);

    auto loss_of = [&](ParameterSet ps, Gradients *grads) {
        Tape t;
        ParamBinder bind(t, ps);
        ForwardOptions fo;
        fo.train = true;
        const GraphOutput g = forward_graph(bind, cfg, t.constant(input), fo);
        Var total;
        for (const auto &head : {g.head1, g.head2}) {
            if (!head) continue;
            Var l;
            if (head->shape()[1] == cfg.T) {
                l = sequence_loss(*head, target_seq);
            } else {
                Grid center({B, 1, cfg.J, 3});
                const std::size_t c = cfg.T / 2, n = cfg.J * 3;
                for (std::size_t b = 0; b < B; ++b)
                    for (std::size_t k = 0; k < n; ++k) center[b * n + k] = target_seq[(b * cfg.T + c) * n + k];
                l = single_frame_loss(*head, center);
            }
            total = total.valid() ? ag::add(total, l) : l;
        }
        if (grads) *grads = t.backward(total);
        return total.value()[0];
    };

    Gradients analytic;
    loss_of(base, &analytic);
    RngStream pick(seed + 3);
    double worst = 0.0;
    const double eps = 1e-5;
    for (const auto &[path, value] : base.values) {
        for (std::size_t k = 0; k < probes_per_param; ++k) {
            const std::size_t i = pick.below(value.size());
            ParameterSet up = base, down = base;
            up.values[path][i] += eps;
            down.values[path][i] -= eps;
            const double numeric = (loss_of(up, nullptr) - loss_of(down, nullptr)) / (2 * eps);
            const double a = analytic.at(path)[i];
            worst = std::max(worst, std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)}));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("two-layer vanilla encoder on 8 frames with d_m 16 passes grad check") {
    ModelConfig cfg;
    cfg.T = 8;
    cfg.J = 5;
    cfg.d_m = 16;
    cfg.d_f = 32;
    cfg.h = 4;
    cfg.N1 = 2;
    cfg.N2 = 0;
    cfg.s_m = {};
    cfg.dropout = 0.0;
    cfg.mode = Mode::full;
    cfg.validate();
    CHECK(model_grad_error(cfg, 2, 11, 4) <= kTol);
}

TEST_CASE("full strided network passes grad check in every mode") {
    for (Mode m : {Mode::full_to_single, Mode::single, Mode::single_to_single, Mode::full, Mode::full_to_full}) {
        ModelConfig cfg;
        cfg.T = 9;
        cfg.J = 4;
        cfg.d_m = 8;
        cfg.d_f = 16;
        cfg.h = 2;
        cfg.N1 = 1;
        cfg.N2 = 2;
        cfg.s_m = {3, 3};
        cfg.dropout = 0.0;
        cfg.mode = m;
        if (cfg.second_stack() == StackKind::vanilla) cfg.s_m = {};
        cfg.validate();
        INFO("mode " << mode_name(m));
        CHECK(model_grad_error(cfg, 3, 21, 3) <= kTol);
    }
}
