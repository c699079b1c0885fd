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

#include "model/model.hpp"

#include "util/log.hpp"

namespace spose {

Var ParamBinder::operator()(const std::string &path) {
    auto it = bound_.find(path);
    if (it != bound_.end()) return it->second;
    Var v = tape_.parameter(path, params_.at(path));
    bound_.emplace(path, v);
    return v;
}

kernels::BatchNormStats &ParamBinder::mutable_stats(const std::string &path) {
    require(mutable_ != nullptr, ErrorKind::internal, "train-mode forward needs a mutable parameter set");
    return mutable_->stats(path);
}

const kernels::BatchNormStats &ParamBinder::stats(const std::string &path) const {
    auto it = params_.norm_stats.find(path);
    if (it == params_.norm_stats.end()) fail(ErrorKind::internal, "no batch-norm statistics for '" + path + "'");
    return it->second;
}

namespace {

Var batch_norm(ParamBinder &p, const std::string &prefix, Var x, const ForwardOptions &opt) {
    if (opt.train) return ag::batch_norm_train(x, p(prefix + ".gain"), p(prefix + ".shift"), p.mutable_stats(prefix));
    const auto &st = p.stats(prefix);
    if (!st.updated)
        log::warn_once("bn-init:" + prefix,
                       "batch norm '" + prefix + "' evaluated before any running-statistics update; using mean 0, var 1");
    return ag::batch_norm_eval(x, p(prefix + ".gain"), p(prefix + ".shift"), st);
}

Var dropout(Var x, const ModelConfig &cfg, const ForwardOptions &opt) {
    if (!opt.train || cfg.dropout == 0.0) return x;
    require(opt.rng != nullptr, ErrorKind::internal, "train-mode dropout needs an RNG stream");
    return ag::dropout(x, cfg.dropout, *opt.rng, true);
}

void check_layer(Var z, const std::string &where) {
    if (!z.value().all_finite()) fail(ErrorKind::numeric, "non-finite activations after " + where);
}

}  // namespace

Var pose_embedding(ParamBinder &p, const ModelConfig &cfg, Var input, const ForwardOptions &opt) {
    const Shape &s = input.shape();
    require(s.size() == 4 && s[1] == cfg.T && s[2] == cfg.J && s[3] == 2, ErrorKind::dimension,
            "pose input " + shape_str(s) + " does not match [B, " + std::to_string(cfg.T) + ", " +
                std::to_string(cfg.J) + ", 2]");
    input.value().check_finite("pose input");
    p.tape().set_scope("embed");
    Var tokens = ag::reshape(input, {s[0], cfg.T, cfg.J * 2});
    Var z = ag::linear(tokens, p("embed.conv.w"), p("embed.conv.b"));
    z = batch_norm(p, "embed.bn", z, opt);
    z = dropout(z, cfg, opt);
    return ag::relu(z);
}

Var msa(ParamBinder &p, const std::string &prefix, Var z, std::size_t heads, Grid *maps) {
    require(heads >= 1 && z.shape().back() % heads == 0, ErrorKind::config,
            "model width " + std::to_string(z.shape().back()) + " is not divisible by " + std::to_string(heads) +
                " heads");
    Var q = ag::linear(z, p(prefix + ".wq"), p(prefix + ".bq"));
    Var k = ag::linear(z, p(prefix + ".wk"), p(prefix + ".bk"));
    Var v = ag::linear(z, p(prefix + ".wv"), p(prefix + ".bv"));
    Var a = ag::attention(q, k, v, heads, maps);
    return ag::linear(a, p(prefix + ".wo"), p(prefix + ".bo"));
}

Var vte_layer(ParamBinder &p, const std::string &prefix, Var z, const ModelConfig &cfg, const ForwardOptions &opt,
              Grid *maps) {
    Var n1 = ag::layer_norm(z, p(prefix + ".ln1.gain"), p(prefix + ".ln1.shift"));
    Var zh = ag::add(z, msa(p, prefix + ".msa", n1, cfg.h, maps));
    Var n2 = ag::layer_norm(zh, p(prefix + ".ln2.gain"), p(prefix + ".ln2.shift"));
    Var f = ag::relu(ag::linear(n2, p(prefix + ".ffn.w1"), p(prefix + ".ffn.b1")));
    f = dropout(f, cfg, opt);
    f = ag::linear(f, p(prefix + ".ffn.w2"), p(prefix + ".ffn.b2"));
    return ag::add(zh, f);
}

Var ste_layer(ParamBinder &p, const std::string &prefix, Var z, std::size_t stride, const ModelConfig &cfg,
              const ForwardOptions &opt, Grid *maps) {
    Var table = p(prefix + ".pos");
    require(table.shape()[0] == z.shape()[1], ErrorKind::config,
            prefix + ".pos has " + std::to_string(table.shape()[0]) + " rows for an input of length " +
                std::to_string(z.shape()[1]));
    z = ag::add_table(z, table);
    Var n1 = ag::layer_norm(z, p(prefix + ".ln1.gain"), p(prefix + ".ln1.shift"));
    Var zh = ag::add(z, msa(p, prefix + ".msa", n1, cfg.h, maps));
    Var n2 = ag::layer_norm(zh, p(prefix + ".ln2.gain"), p(prefix + ".ln2.shift"));
    Var f = ag::relu(ag::conv1d_strided(n2, p(prefix + ".cffn.conv1.w"), p(prefix + ".cffn.conv1.b"), cfg.s_f));
    f = dropout(f, cfg, opt);
    f = ag::conv1d_strided(f, p(prefix + ".cffn.conv2.w"), p(prefix + ".cffn.conv2.b"), stride);
    return ag::add(ag::maxpool1d(zh, stride), f);
}

Var regression_head(ParamBinder &p, const std::string &prefix, Var z, std::size_t joints, const ForwardOptions &opt) {
    p.tape().set_scope(prefix);
    const Shape s = z.shape();
    Var x = batch_norm(p, prefix + ".bn", z, opt);
    x = ag::linear(x, p(prefix + ".conv.w"), p(prefix + ".conv.b"));
    return ag::reshape(x, {s[0], s[1], joints, 3});
}

GraphOutput forward_graph(ParamBinder &p, const ModelConfig &cfg, Var input, const ForwardOptions &opt) {
    const LossPlan plan = plan_losses(cfg);
    GraphOutput out;
    Var z = pose_embedding(p, cfg, input, opt);
    z = ag::add_table(z, p("pos.e1"));

    auto run_vte = [&](std::size_t i) {
        const std::string name = "vte." + std::to_string(i);
        p.tape().set_scope(name);
        Grid maps;
        z = vte_layer(p, name, z, cfg, opt, opt.keep_attention ? &maps : nullptr);
        check_layer(z, "vte layer " + std::to_string(i));
        if (opt.keep_attention) out.attention.push_back({"vte", i, std::move(maps)});
    };

    for (std::size_t i = 0; i < cfg.N1; ++i) run_vte(i);
    if (plan.head1.present) out.head1 = regression_head(p, "head1", z, cfg.J, opt);

    if (cfg.second_stack() == StackKind::vanilla) {
        for (std::size_t i = cfg.N1; i < cfg.N1 + cfg.N2; ++i) run_vte(i);
    } else {
        for (std::size_t n = 0; n < cfg.N2; ++n) {
            const std::string name = "ste." + std::to_string(n);
            p.tape().set_scope(name);
            Grid maps;
            z = ste_layer(p, name, z, cfg.s_m[n], cfg, opt, opt.keep_attention ? &maps : nullptr);
            check_layer(z, "ste layer " + std::to_string(n));
            if (opt.keep_attention) out.attention.push_back({"ste", n, std::move(maps)});
        }
    }
    if (plan.head2.present) out.head2 = regression_head(p, "head2", z, cfg.J, opt);
    p.tape().set_scope("");
    return out;
}

Var final_prediction(const ModelConfig &cfg, const GraphOutput &out) {
    const LossPlan plan = plan_losses(cfg);
    Var head = plan.final_is_head2 ? *out.head2 : *out.head1;
    const std::size_t len = head.shape()[1];
    return ag::take_frame(head, len == 1 ? 0 : cfg.target_index());
}

namespace {

ForwardOutput run_forward(ParamBinder &binder, Tape &tape, const ModelConfig &cfg, const Grid &input,
                          const ForwardOptions &opt) {
    const bool batched = input.rank() == 4;
    Var in = tape.constant(batched ? input : input.reshaped({1, input.dim(0), input.dim(1), input.dim(2)}));
    GraphOutput g = forward_graph(binder, cfg, in, opt);
    ForwardOutput out;
    out.attention = std::move(g.attention);
    auto unbatch = [&](Grid x) {
        if (!batched) {
            Shape s(x.shape().begin() + 1, x.shape().end());
            x.reshape(std::move(s));
        }
        return x;
    };
    std::optional<Var> seq;
    if (g.head1 && g.head1->shape()[1] == cfg.T)
        seq = g.head1;
    else if (g.head2 && g.head2->shape()[1] == cfg.T)
        seq = g.head2;
    if (seq) out.seq3d = unbatch(seq->value());
    out.target3d = unbatch(final_prediction(cfg, g).value());
    return out;
}

}  // namespace

ForwardOutput forward(const ModelConfig &cfg, ParameterSet &params, const Grid &input, const ForwardOptions &opt,
                      MacCounter *macs) {
    require(input.rank() == 3 || input.rank() == 4, ErrorKind::dimension,
            "forward expects [T, J, 2] or [B, T, J, 2], got " + shape_str(input.shape()));
    Tape tape;
    tape.set_mac_counter(macs);
    ParamBinder binder(tape, params);
    return run_forward(binder, tape, cfg, input, opt);
}

ForwardOutput predict(const ModelConfig &cfg, const ParameterSet &params, const Grid &input, bool keep_attention,
                      MacCounter *macs) {
    require(input.rank() == 3 || input.rank() == 4, ErrorKind::dimension,
            "predict expects [T, J, 2] or [B, T, J, 2], got " + shape_str(input.shape()));
    Tape tape;
    tape.set_mac_counter(macs);
    ParamBinder binder(tape, params);
    ForwardOptions opt;
    opt.keep_attention = keep_attention;
    return run_forward(binder, tape, cfg, input, opt);
}

}  // namespace spose
