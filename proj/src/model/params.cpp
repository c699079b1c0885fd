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

#include "model/params.hpp"

#include <cmath>

#include "numerics/rng.hpp"
#include "util/hash.hpp"

namespace spose {

namespace {

void add_norm(std::vector<ParamSpec> &out, const std::string &prefix, std::size_t width) {
    out.push_back({prefix + ".gain", {width}, InitKind::ones, 1});
    out.push_back({prefix + ".shift", {width}, InitKind::zeros, 1});
}

void add_linear(std::vector<ParamSpec> &out, const std::string &prefix, const char *w, const char *b,
                std::size_t din, std::size_t dout) {
    out.push_back({prefix + "." + w, {din, dout}, InitKind::fan_in_uniform, din});
    out.push_back({prefix + "." + b, {dout}, InitKind::fan_in_uniform, din});
}

void add_conv(std::vector<ParamSpec> &out, const std::string &prefix, std::size_t k, std::size_t din,
              std::size_t dout) {
    out.push_back({prefix + ".w", {k, din, dout}, InitKind::fan_in_uniform, k * din});
    out.push_back({prefix + ".b", {dout}, InitKind::fan_in_uniform, k * din});
}

void add_msa(std::vector<ParamSpec> &out, const std::string &prefix, std::size_t d) {
    add_linear(out, prefix, "wq", "bq", d, d);
    add_linear(out, prefix, "wk", "bk", d, d);
    add_linear(out, prefix, "wv", "bv", d, d);
    add_linear(out, prefix, "wo", "bo", d, d);
}

void add_head(std::vector<ParamSpec> &out, const std::string &prefix, const ModelConfig &cfg) {
    add_norm(out, prefix + ".bn", cfg.d_m);
    add_linear(out, prefix + ".conv", "w", "b", cfg.d_m, cfg.J * 3);
}

}  // namespace

std::vector<ParamSpec> param_specs(const ModelConfig &cfg) {
    cfg.validate();
    const std::size_t d = cfg.d_m;
    std::vector<ParamSpec> out;
    add_linear(out, "embed.conv", "w", "b", cfg.J * 2, d);
    add_norm(out, "embed.bn", d);
    out.push_back({"pos.e1", {cfg.T, d}, InitKind::position, 1});

    const std::size_t vanilla_layers = cfg.N1 + (cfg.second_stack() == StackKind::vanilla ? cfg.N2 : 0);
    for (std::size_t i = 0; i < vanilla_layers; ++i) {
        const std::string p = "vte." + std::to_string(i);
        add_norm(out, p + ".ln1", d);
        add_msa(out, p + ".msa", d);
        add_norm(out, p + ".ln2", d);
        add_linear(out, p + ".ffn", "w1", "b1", d, cfg.d_f);
        add_linear(out, p + ".ffn", "w2", "b2", cfg.d_f, d);
    }
    if (cfg.second_stack() == StackKind::strided) {
        const auto lengths = cfg.strided_lengths();
        for (std::size_t n = 0; n < cfg.N2; ++n) {
            const std::string p = "ste." + std::to_string(n);
            out.push_back({p + ".pos", {lengths[n], d}, InitKind::position, 1});
            add_norm(out, p + ".ln1", d);
            add_msa(out, p + ".msa", d);
            add_norm(out, p + ".ln2", d);
            add_conv(out, p + ".cffn.conv1", cfg.k_f, d, cfg.d_f);
            add_conv(out, p + ".cffn.conv2", cfg.k_m, cfg.d_f, d);
        }
    }
    const LossPlan plan = plan_losses(cfg);
    if (plan.head1.present) add_head(out, "head1", cfg);
    if (plan.head2.present) add_head(out, "head2", cfg);
    return out;
}

std::vector<std::string> batch_norm_paths(const ModelConfig &cfg) {
    std::vector<std::string> out{"embed.bn"};
    const LossPlan plan = plan_losses(cfg);
    if (plan.head1.present) out.push_back("head1.bn");
    if (plan.head2.present) out.push_back("head2.bn");
    return out;
}

const Grid &ParameterSet::at(const std::string &path) const {
    auto it = values.find(path);
    if (it == values.end()) fail(ErrorKind::internal, "no parameter '" + path + "'");
    return it->second;
}

Grid &ParameterSet::at(const std::string &path) {
    auto it = values.find(path);
    if (it == values.end()) fail(ErrorKind::internal, "no parameter '" + path + "'");
    return it->second;
}

kernels::BatchNormStats &ParameterSet::stats(const std::string &path) {
    auto it = norm_stats.find(path);
    if (it == norm_stats.end()) fail(ErrorKind::internal, "no batch-norm statistics for '" + path + "'");
    return it->second;
}

std::size_t ParameterSet::count() const {
    std::size_t n = 0;
    for (const auto &[path, g] : values) n += g.size();
    return n;
}

bool ParameterSet::operator==(const ParameterSet &other) const {
    if (values != other.values || norm_stats.size() != other.norm_stats.size()) return false;
    for (const auto &[path, s] : norm_stats) {
        auto it = other.norm_stats.find(path);
        if (it == other.norm_stats.end()) return false;
        if (s.running_mean != it->second.running_mean || s.running_var != it->second.running_var ||
            s.updated != it->second.updated)
            return false;
    }
    return true;
}

ParameterSet init_params(const ModelConfig &cfg, std::uint64_t seed) {
    ParameterSet ps;
    const RngStream root(seed);
    for (const ParamSpec &spec : param_specs(cfg)) {
        Grid g(spec.shape);
        RngStream rng = root.fork(fnv1a64(spec.path));
        switch (spec.init) {
            case InitKind::fan_in_uniform: {
                const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
                for (auto &v : g.data()) v = rng.uniform(-bound, bound);
                break;
            }
            case InitKind::ones:
                g.fill(1.0);
                break;
            case InitKind::zeros:
                break;
            case InitKind::position:
                for (auto &v : g.data()) v = 0.02 * rng.normal();
                break;
        }
        ps.values.emplace(spec.path, std::move(g));
    }
    for (const auto &path : batch_norm_paths(cfg)) ps.norm_stats.emplace(path, kernels::BatchNormStats::fresh(cfg.d_m));
    return ps;
}

}  // namespace spose
