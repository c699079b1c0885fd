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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "numerics/grid.hpp"
#include "numerics/kernels.hpp"

namespace spose {

class Tape;

// Handle to a value recorded on a tape.
class Var {
   public:
    Var() = default;

    bool valid() const { return tape_ != nullptr; }
    Tape *tape() const { return tape_; }
    std::size_t id() const { return id_; }
    const Grid &value() const;
    const Shape &shape() const { return value().shape(); }

   private:
    friend class Tape;
    Var(Tape *tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape *tape_ = nullptr;
    std::size_t id_ = 0;
};

// Multiply-accumulate tally keyed by a scope label (e.g. "vte.0").
class MacCounter {
   public:
    void add(const std::string &scope, std::uint64_t macs) { per_scope_[scope] += macs; }
    std::uint64_t at(const std::string &scope) const;
    std::uint64_t total() const;
    const std::map<std::string, std::uint64_t> &per_scope() const { return per_scope_; }
    void clear() { per_scope_.clear(); }

   private:
    std::map<std::string, std::uint64_t> per_scope_;
};

using Gradients = std::map<std::string, Grid>;

// Records a computation for reverse-mode differentiation. Nodes are
// appended in evaluation order, so every input id is smaller than the id of
// the node that consumes it and reverse order is a valid topological order.
// A tape has a single writer.
class Tape {
   public:
    // Returns the gradient of the node w.r.t. each input, in input order. An
    // empty Grid means "no contribution".
    using BackwardFn = std::function<std::vector<Grid>(const Grid &dy)>;

    Tape() = default;
    Tape(const Tape &) = delete;
    Tape &operator=(const Tape &) = delete;

    Var constant(Grid value);
    // Trainable leaf; its gradient is reported under `path`.
    Var parameter(const std::string &path, Grid value);

    Var record(Grid value, std::vector<Var> inputs, BackwardFn backward, const char *op);

    const Grid &value(Var v) const { return nodes_.at(v.id_).value; }
    bool requires_grad(Var v) const { return nodes_.at(v.id_).requires_grad; }
    std::size_t size() const { return nodes_.size(); }

    // Seeds the scalar `loss` with `seed` and propagates to every trainable
    // leaf. Leaves the loss does not reach receive zero gradients.
    Gradients backward(Var loss, double seed = 1.0);

    // Gradient of an arbitrary node after backward(); zeros if unreached.
    Grid grad(Var v) const;

    void set_mac_counter(MacCounter *counter) { macs_ = counter; }
    void set_scope(std::string scope) { scope_ = std::move(scope); }
    const std::string &scope() const { return scope_; }
    void count_macs(std::uint64_t macs) {
        if (macs_) macs_->add(scope_, macs);
    }

   private:
    struct Node {
        Grid value;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        bool requires_grad = false;
        std::string path;  // non-empty for parameters
        const char *op = "";
    };

    std::vector<Node> nodes_;
    std::vector<Grid> grads_;
    MacCounter *macs_ = nullptr;
    std::string scope_;
};

// Differentiable operations. Each one evaluates its kernel eagerly and
// records the backward rule.
namespace ag {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var square(Var a);
Var sum(Var a);
Var relu(Var a);
Var reshape(Var a, Shape shape);

// x[B, L, D] + table[L, D] broadcast over the batch.
Var add_table(Var x, Var table);

// x[B, T, ...] -> [B, ...] at time index t.
Var take_frame(Var x, std::size_t t);

Var linear(Var x, Var w, Var b);
Var conv1d_strided(Var x, Var kernel, Var bias, std::size_t stride);
Var maxpool1d(Var x, std::size_t stride);
Var softmax(Var x, std::size_t axis);
Var layer_norm(Var x, Var gain, Var shift, double eps = 1e-5);
// Train mode normalizes by batch statistics and updates `stats`; eval mode
// is a pure function of the running statistics.
Var batch_norm_train(Var x, Var gain, Var shift, kernels::BatchNormStats &stats, double momentum = 0.1,
                     double eps = 1e-5);
Var batch_norm_eval(Var x, Var gain, Var shift, const kernels::BatchNormStats &stats, double eps = 1e-5);
Var dropout(Var x, double p, RngStream &rng, bool train);

// Multi-head attention core (no projections). `maps` receives [B, h, L, L].
Var attention(Var q, Var k, Var v, std::size_t heads, Grid *maps = nullptr);

// Sum over all rows of the Euclidean norm of (pred - target) along the last
// axis. The norm's gradient at a zero residual is taken as zero.
Var l2_norm_sum(Var pred, const Grid &target);

}  // namespace ag

}  // namespace spose
