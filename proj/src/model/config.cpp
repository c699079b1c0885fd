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

#include "model/config.hpp"

#include <json.hpp>

#include "util/hash.hpp"
#include "numerics/error.hpp"
#include "numerics/kernels.hpp"

namespace spose {

using nlohmann::json;

const char *mode_name(Mode mode) {
    switch (mode) {
        case Mode::full:
            return "full";
        case Mode::single:
            return "single";
        case Mode::full_to_full:
            return "full-to-full";
        case Mode::single_to_single:
            return "single-to-single";
        case Mode::full_to_single:
            return "full-to-single";
    }
    return "?";
}

Mode parse_mode(const std::string &name) {
    for (Mode m : {Mode::full, Mode::single, Mode::full_to_full, Mode::single_to_single, Mode::full_to_single})
        if (name == mode_name(m)) return m;
    fail(ErrorKind::config, "unknown training mode '" + name + "'");
}

ModelConfig ModelConfig::for_frames(std::size_t frames) {
    ModelConfig cfg;
    cfg.T = frames;
    switch (frames) {
        case 27:
            cfg.s_m = {3, 3, 3};
            break;
        case 81:
            cfg.s_m = {9, 3, 3};
            break;
        case 243:
            cfg.s_m = {3, 9, 9};
            break;
        case 351:
            cfg.s_m = {3, 9, 13};
            break;
        default:
            fail(ErrorKind::config, "no stride preset for " + std::to_string(frames) + " frames");
    }
    return cfg;
}

StackKind ModelConfig::second_stack() const {
    return (mode == Mode::full || mode == Mode::full_to_full) ? StackKind::vanilla : StackKind::strided;
}

std::vector<std::size_t> ModelConfig::strided_lengths() const {
    if (second_stack() != StackKind::strided) return {};
    std::vector<std::size_t> lengths{T};
    for (std::size_t s : s_m) lengths.push_back(kernels::strided_length(lengths.back(), s));
    return lengths;
}

void ModelConfig::validate() const {
    auto check = [](bool ok, const std::string &what) { require(ok, ErrorKind::config, what); };
    check(T >= 1, "T must be positive");
    check(J >= 1, "J must be positive");
    check(d_m >= 1 && d_f >= 1, "d_m and d_f must be positive");
    check(h >= 1 && d_m % h == 0, "d_m (" + std::to_string(d_m) + ") must be divisible by h (" + std::to_string(h) + ")");
    check(N1 + N2 >= 1, "at least one encoder layer is required");
    check(k_f % 2 == 1 && k_m % 2 == 1, "kernel sizes k_f and k_m must be odd");
    check(s_f == 1, "s_f must be 1");
    check(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
    check(lambda_f >= 0.0 && lambda_s >= 0.0, "loss weights must be non-negative");
    if (second_stack() == StackKind::strided) {
        check(s_m.size() == N2, "s_m has " + std::to_string(s_m.size()) + " entries but N2 = " + std::to_string(N2));
        for (std::size_t s : s_m) check(s >= 1, "strides must be >= 1");
        if (N2 > 0)
            check(strided_lengths().back() == 1,
                  "stride schedule does not reduce T = " + std::to_string(T) + " to a single frame");
    } else {
        check(s_m.empty() || s_m.size() == N2, "s_m must be empty or have N2 entries");
    }
    const LossPlan plan = plan_losses(*this);
    check(plan.head1.weight > 0.0 || plan.head2.weight > 0.0, "all active loss weights are zero");
}

LossPlan plan_losses(const ModelConfig &cfg) {
    LossPlan plan;
    const bool supervise_intermediate =
        cfg.mode == Mode::full_to_single || cfg.mode == Mode::single_to_single || cfg.mode == Mode::full_to_full;
    const HeadKind head1_kind =
        (cfg.mode == Mode::single || cfg.mode == Mode::single_to_single) ? HeadKind::single : HeadKind::sequence;

    if (cfg.N2 == 0) {
        plan.head1 = {cfg.N1 > 0, head1_kind, cfg.lambda_f};
        plan.final_is_head2 = false;
        return plan;
    }
    plan.head2.present = true;
    plan.head2.kind = cfg.second_stack() == StackKind::strided ? HeadKind::single : HeadKind::sequence;
    plan.head2.weight = cfg.lambda_s;
    if (cfg.N1 > 0 && supervise_intermediate) plan.head1 = {true, head1_kind, cfg.lambda_f};
    return plan;
}

namespace {

json to_json_obj(const ModelConfig &c) {
    return json{{"T", c.T},
                {"J", c.J},
                {"d_m", c.d_m},
                {"d_f", c.d_f},
                {"h", c.h},
                {"N1", c.N1},
                {"N2", c.N2},
                {"k_f", c.k_f},
                {"k_m", c.k_m},
                {"s_f", c.s_f},
                {"s_m", c.s_m},
                {"dropout", c.dropout},
                {"lambda_f", c.lambda_f},
                {"lambda_s", c.lambda_s},
                {"mode", mode_name(c.mode)}};
}

}  // namespace

std::string config_to_json(const ModelConfig &cfg) { return to_json_obj(cfg).dump(); }

ModelConfig config_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        fail(ErrorKind::config, std::string("invalid config JSON: ") + e.what());
    }
    require(j.is_object(), ErrorKind::config, "config JSON must be an object");
    ModelConfig c;
    const json defaults = to_json_obj(c);
    for (const auto &[key, value] : j.items())
        require(defaults.contains(key), ErrorKind::config, "unknown config key '" + key + "'");
    try {
        auto get = [&](const char *key, auto &field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        get("T", c.T);
        get("J", c.J);
        get("d_m", c.d_m);
        get("d_f", c.d_f);
        get("h", c.h);
        get("N1", c.N1);
        get("N2", c.N2);
        get("k_f", c.k_f);
        get("k_m", c.k_m);
        get("s_f", c.s_f);
        get("s_m", c.s_m);
        get("dropout", c.dropout);
        get("lambda_f", c.lambda_f);
        get("lambda_s", c.lambda_s);
        if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    } catch (const json::exception &e) {
        fail(ErrorKind::config, std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

std::uint64_t config_digest(const ModelConfig &cfg) { return fnv1a64(config_to_json(cfg)); }

}  // namespace spose
