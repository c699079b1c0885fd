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

#include "numerics/tape.hpp"

#include <cmath>
#include <memory>

namespace spose {

const Grid &Var::value() const {
    require(tape_ != nullptr, ErrorKind::internal, "use of an unbound Var");
    return tape_->value(*this);
}

std::uint64_t MacCounter::at(const std::string &scope) const {
    auto it = per_scope_.find(scope);
    return it == per_scope_.end() ? 0 : it->second;
}

std::uint64_t MacCounter::total() const {
    std::uint64_t t = 0;
    for (const auto &[k, v] : per_scope_) t += v;
    return t;
}

Var Tape::constant(Grid value) {
    nodes_.push_back(Node{std::move(value), {}, nullptr, false, {}, "constant"});
    return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(const std::string &path, Grid value) {
    require(!path.empty(), ErrorKind::internal, "parameter leaves need a path");
    nodes_.push_back(Node{std::move(value), {}, nullptr, true, path, "parameter"});
    return Var(this, nodes_.size() - 1);
}

Var Tape::record(Grid value, std::vector<Var> inputs, BackwardFn backward, const char *op) {
    Node n;
    n.value = std::move(value);
    n.op = op;
    for (const Var &v : inputs) {
        require(v.tape_ == this, ErrorKind::internal, std::string(op) + ": input from a different tape");
        n.inputs.push_back(v.id_);
        n.requires_grad = n.requires_grad || nodes_[v.id_].requires_grad;
    }
    if (n.requires_grad) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

Gradients Tape::backward(Var loss, double seed) {
    require(loss.tape_ == this, ErrorKind::internal, "backward: loss from a different tape");
    require(value(loss).size() == 1, ErrorKind::dimension, "backward: loss must be a scalar");
    grads_.assign(nodes_.size(), Grid());
    grads_[loss.id_] = Grid(value(loss).shape(), seed);
    for (std::size_t id = loss.id_ + 1; id-- > 0;) {
        Node &n = nodes_[id];
        if (grads_[id].empty() || !n.requires_grad || !n.backward) continue;
        std::vector<Grid> in_grads = n.backward(grads_[id]);
        require(in_grads.size() == n.inputs.size(), ErrorKind::internal,
                std::string(n.op) + ": backward returned wrong number of gradients");
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
            const std::size_t src = n.inputs[i];
            if (src >= id) fail(ErrorKind::internal, "cycle detected in tape at node " + std::to_string(id));
            if (in_grads[i].empty() || !nodes_[src].requires_grad) continue;
            Grid &acc = grads_[src];
            if (acc.empty()) {
                acc = std::move(in_grads[i]);
                acc.reshape(nodes_[src].value.shape());
            } else {
                require(acc.size() == in_grads[i].size(), ErrorKind::internal,
                        std::string(n.op) + ": gradient size mismatch");
                for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += in_grads[i][j];
            }
        }
    }
    Gradients out;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        const Node &n = nodes_[id];
        if (n.path.empty()) continue;
        Grid g = grads_[id].empty() ? Grid(n.value.shape()) : grads_[id];
        auto [it, inserted] = out.emplace(n.path, g);
        if (!inserted)
            for (std::size_t j = 0; j < g.size(); ++j) it->second[j] += g[j];
    }
    return out;
}

Grid Tape::grad(Var v) const {
    if (v.id_ < grads_.size() && !grads_[v.id_].empty()) return grads_[v.id_];
    return Grid(value(v).shape());
}

namespace ag {

namespace {

Tape &tape_of(Var a) {
    require(a.valid(), ErrorKind::internal, "operation on an unbound Var");
    return *a.tape();
}

void same_shape(const Var &a, const Var &b, const char *op) {
    require(a.shape() == b.shape(), ErrorKind::dimension,
            std::string(op) + ": shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()) + " differ");
}

}  // namespace

Var add(Var a, Var b) {
    same_shape(a, b, "add");
    Grid y = a.value();
    const Grid &bv = b.value();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
    return tape_of(a).record(std::move(y), {a, b}, [](const Grid &dy) { return std::vector<Grid>{dy, dy}; }, "add");
}

Var sub(Var a, Var b) {
    same_shape(a, b, "sub");
    Grid y = a.value();
    const Grid &bv = b.value();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
    return tape_of(a).record(
        std::move(y), {a, b},
        [](const Grid &dy) {
            Grid neg = dy;
            for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -neg[i];
            return std::vector<Grid>{dy, neg};
        },
        "sub");
}

Var mul(Var a, Var b) {
    same_shape(a, b, "mul");
    Grid y = a.value();
    const Grid &bv = b.value();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
    return tape_of(a).record(
        std::move(y), {a, b},
        [a, b](const Grid &dy) {
            Grid da = dy, db = dy;
            const Grid &av = a.value(), &bv = b.value();
            for (std::size_t i = 0; i < dy.size(); ++i) {
                da[i] *= bv[i];
                db[i] *= av[i];
            }
            return std::vector<Grid>{da, db};
        },
        "mul");
}

Var scale(Var a, double s) {
    Grid y = a.value();
    for (auto &v : y.data()) v *= s;
    return tape_of(a).record(
        std::move(y), {a},
        [s](const Grid &dy) {
            Grid dx = dy;
            for (auto &v : dx.data()) v *= s;
            return std::vector<Grid>{dx};
        },
        "scale");
}

Var square(Var a) {
    Grid y = a.value();
    for (auto &v : y.data()) v *= v;
    return tape_of(a).record(
        std::move(y), {a},
        [a](const Grid &dy) {
            Grid dx = dy;
            const Grid &x = a.value();
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= 2.0 * x[i];
            return std::vector<Grid>{dx};
        },
        "square");
}

Var sum(Var a) {
    double s = 0.0;
    for (double v : a.value().data()) s += v;
    const Shape in_shape = a.shape();
    return tape_of(a).record(
        Grid::scalar(s), {a}, [in_shape](const Grid &dy) { return std::vector<Grid>{Grid(in_shape, dy[0])}; },
        "sum");
}

Var relu(Var a) {
    return tape_of(a).record(
        kernels::relu(a.value()), {a},
        [a](const Grid &dy) {
            Grid dx = dy;
            const Grid &x = a.value();
            for (std::size_t i = 0; i < dx.size(); ++i)
                if (!(x[i] > 0.0)) dx[i] = 0.0;
            return std::vector<Grid>{dx};
        },
        "relu");
}

Var reshape(Var a, Shape shape) {
    Grid y = a.value().reshaped(std::move(shape));
    const Shape in_shape = a.shape();
    return tape_of(a).record(
        std::move(y), {a}, [in_shape](const Grid &dy) { return std::vector<Grid>{dy.reshaped(in_shape)}; },
        "reshape");
}

Var add_table(Var x, Var table) {
    const auto [B, L, D] = seq_view(x.value(), "add_table");
    require(table.value().rank() == 2 && table.value().dim(0) == L && table.value().dim(1) == D,
            ErrorKind::config,
            "position table " + shape_str(table.shape()) + " does not match sequence " + shape_str(x.shape()));
    Grid y = x.value();
    const Grid &tv = table.value();
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t i = 0; i < L * D; ++i) y[b * L * D + i] += tv[i];
    return tape_of(x).record(
        std::move(y), {x, table},
        [B, L, D](const Grid &dy) {
            Grid dt({L, D});
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t i = 0; i < L * D; ++i) dt[i] += dy[b * L * D + i];
            return std::vector<Grid>{dy, dt};
        },
        "add_table");
}

Var take_frame(Var x, std::size_t t) {
    const Shape &s = x.shape();
    require(s.size() >= 3, ErrorKind::dimension, "take_frame expects [B, T, ...]");
    require(t < s[1], ErrorKind::dimension, "take_frame: index out of range");
    const std::size_t B = s[0], T = s[1];
    const std::size_t inner = x.value().size() / (B * T);
    Shape out_shape{B};
    out_shape.insert(out_shape.end(), s.begin() + 2, s.end());
    Grid y(out_shape);
    const Grid &xv = x.value();
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t i = 0; i < inner; ++i) y[b * inner + i] = xv[(b * T + t) * inner + i];
    const Shape in_shape = s;
    return tape_of(x).record(
        std::move(y), {x},
        [in_shape, B, T, t, inner](const Grid &dy) {
            Grid dx(in_shape);
            for (std::size_t b = 0; b < B; ++b)
                for (std::size_t i = 0; i < inner; ++i) dx[(b * T + t) * inner + i] = dy[b * inner + i];
            return std::vector<Grid>{dx};
        },
        "take_frame");
}

Var linear(Var x, Var w, Var b) {
    Tape &tape = tape_of(x);
    Grid y = kernels::linear(x.value(), w.value(), b.value());
    tape.count_macs(static_cast<std::uint64_t>(rows_of(x.value())) * w.value().dim(0) * w.value().dim(1));
    return tape.record(
        std::move(y), {x, w, b},
        [x, w](const Grid &dy) {
            auto g = kernels::linear_backward(x.value(), w.value(), dy);
            return std::vector<Grid>{std::move(g.dx), std::move(g.dw), std::move(g.db)};
        },
        "linear");
}

Var conv1d_strided(Var x, Var kernel, Var bias, std::size_t stride) {
    Tape &tape = tape_of(x);
    Grid y = kernels::conv1d_strided(x.value(), kernel.value(), bias.value(), stride);
    const Shape &ks = kernel.shape();
    tape.count_macs(static_cast<std::uint64_t>(rows_of(y)) * ks[0] * ks[1] * ks[2]);
    return tape.record(
        std::move(y), {x, kernel, bias},
        [x, kernel, stride](const Grid &dy) {
            auto g = kernels::conv1d_strided_backward(x.value(), kernel.value(), stride, dy);
            return std::vector<Grid>{std::move(g.dx), std::move(g.dkernel), std::move(g.dbias)};
        },
        "conv1d_strided");
}

Var maxpool1d(Var x, std::size_t stride) {
    std::vector<std::size_t> argmax;
    Grid y = kernels::maxpool1d(x.value(), stride, &argmax);
    const Shape in_shape = x.shape();
    return tape_of(x).record(
        std::move(y), {x},
        [in_shape, argmax = std::move(argmax)](const Grid &dy) {
            return std::vector<Grid>{kernels::maxpool1d_backward(in_shape, argmax, dy)};
        },
        "maxpool1d");
}

Var softmax(Var x, std::size_t axis) {
    auto y = std::make_shared<Grid>(kernels::softmax(x.value(), axis));
    Grid out = *y;
    return tape_of(x).record(
        std::move(out), {x},
        [y, axis](const Grid &dy) { return std::vector<Grid>{kernels::softmax_backward(*y, dy, axis)}; },
        "softmax");
}

Var layer_norm(Var x, Var gain, Var shift, double eps) {
    auto saved = std::make_shared<kernels::NormSaved>();
    Grid y = kernels::layer_norm(x.value(), gain.value(), shift.value(), eps, saved.get());
    return tape_of(x).record(
        std::move(y), {x, gain, shift},
        [saved, gain](const Grid &dy) {
            auto g = kernels::layer_norm_backward(*saved, gain.value(), dy);
            return std::vector<Grid>{std::move(g.dx), std::move(g.dgain), std::move(g.dshift)};
        },
        "layer_norm");
}

Var batch_norm_eval(Var x, Var gain, Var shift, const kernels::BatchNormStats &stats, double eps) {
    Grid y = kernels::batch_norm_eval(x.value(), gain.value(), shift.value(), stats, eps);
    const std::size_t C = gain.value().size();
    std::vector<double> inv(C);
    for (std::size_t c = 0; c < C; ++c) inv[c] = 1.0 / std::sqrt(stats.running_var[c] + eps);
    Grid mean = stats.running_mean;
    return tape_of(x).record(
        std::move(y), {x, gain, shift},
        [x, gain, inv = std::move(inv), mean = std::move(mean), C](const Grid &dy) {
            Grid dx(dy.shape()), dg({C}), db({C});
            const Grid &xv = x.value();
            const Grid &gv = gain.value();
            for (std::size_t i = 0; i < dy.size(); ++i) {
                const std::size_t c = i % C;
                dx[i] = dy[i] * gv[c] * inv[c];
                dg[c] += dy[i] * (xv[i] - mean[c]) * inv[c];
                db[c] += dy[i];
            }
            return std::vector<Grid>{dx, dg, db};
        },
        "batch_norm_eval");
}

Var batch_norm_train(Var x, Var gain, Var shift, kernels::BatchNormStats &stats, double momentum, double eps) {
    auto saved = std::make_shared<kernels::NormSaved>();
    Grid y = kernels::batch_norm_train(x.value(), gain.value(), shift.value(), stats, momentum, eps, saved.get());
    return tape_of(x).record(
        std::move(y), {x, gain, shift},
        [saved, gain](const Grid &dy) {
            auto g = kernels::batch_norm_train_backward(*saved, gain.value(), dy);
            return std::vector<Grid>{std::move(g.dx), std::move(g.dgain), std::move(g.dshift)};
        },
        "batch_norm_train");
}

Var dropout(Var x, double p, RngStream &rng, bool train) {
    Grid mask;
    Grid y = kernels::dropout(x.value(), p, rng, train, &mask);
    return tape_of(x).record(
        std::move(y), {x},
        [mask = std::move(mask)](const Grid &dy) {
            Grid dx = dy;
            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask[i];
            return std::vector<Grid>{dx};
        },
        "dropout");
}

Var attention(Var q, Var k, Var v, std::size_t heads, Grid *maps) {
    Tape &tape = tape_of(q);
    auto a = std::make_shared<Grid>();
    Grid y = kernels::attention(q.value(), k.value(), v.value(), heads, a.get());
    const auto [B, L, D] = seq_view(q.value(), "attention");
    // Scores QK^T and the weighted sum AV: L*L*D each per sequence.
    tape.count_macs(2ull * B * L * L * D);
    if (maps) *maps = *a;
    return tape.record(
        std::move(y), {q, k, v},
        [q, k, v, a, heads](const Grid &dy) {
            auto g = kernels::attention_backward(q.value(), k.value(), v.value(), *a, heads, dy);
            return std::vector<Grid>{std::move(g.dq), std::move(g.dk), std::move(g.dv)};
        },
        "attention");
}

Var l2_norm_sum(Var pred, const Grid &target) {
    require(pred.shape() == target.shape(), ErrorKind::dimension,
            "loss: prediction " + shape_str(pred.shape()) + " and target " + shape_str(target.shape()) + " differ");
    const Grid &p = pred.value();
    const std::size_t C = p.shape().back();
    const std::size_t rows = rows_of(p);
    auto norms = std::make_shared<std::vector<double>>(rows);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            const double d = p[r * C + c] - target[r * C + c];
            s += d * d;
        }
        (*norms)[r] = std::sqrt(s);
        total += (*norms)[r];
    }
    Grid tgt = target;
    return tape_of(pred).record(
        Grid::scalar(total), {pred},
        [pred, tgt = std::move(tgt), norms, C, rows](const Grid &dy) {
            const Grid &p = pred.value();
            Grid dx(p.shape());
            for (std::size_t r = 0; r < rows; ++r) {
                const double n = (*norms)[r];
                if (n == 0.0) continue;
                for (std::size_t c = 0; c < C; ++c)
                    dx[r * C + c] = dy[0] * (p[r * C + c] - tgt[r * C + c]) / n;
            }
            return std::vector<Grid>{dx};
        },
        "l2_norm_sum");
}

}  // namespace ag

}  // namespace spose
