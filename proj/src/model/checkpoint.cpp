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

#include "model/checkpoint.hpp"

#include "util/binary_io.hpp"

namespace spose {

namespace {
constexpr std::string_view kMagic = "SPCK";
}

std::string encode_checkpoint(const ModelConfig &cfg, const ParameterSet &params) {
    ByteWriter w;
    w.bytes(kMagic);
    w.u32(kCheckpointVersion);
    w.u64(config_digest(cfg));
    w.str(config_to_json(cfg));
    w.u32(static_cast<std::uint32_t>(params.values.size()));
    for (const auto &[path, g] : params.values) {
        w.str(path);
        w.u32(static_cast<std::uint32_t>(g.rank()));
        for (auto e : g.shape()) w.u64(e);
        for (double v : g.data()) w.f64(v);
    }
    w.u32(static_cast<std::uint32_t>(params.norm_stats.size()));
    for (const auto &[path, s] : params.norm_stats) {
        w.str(path);
        w.u8(s.updated ? 1 : 0);
        w.u32(static_cast<std::uint32_t>(s.running_mean.size()));
        for (double v : s.running_mean.data()) w.f64(v);
        for (double v : s.running_var.data()) w.f64(v);
    }
    w.seal();
    return w.buffer();
}

Checkpoint decode_checkpoint(std::string_view bytes, const std::optional<ModelConfig> &expected) {
    ByteReader r(verify_sealed(bytes, "checkpoint"));
    if (r.bytes(4) != kMagic) fail(ErrorKind::io, "not a checkpoint file (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        fail(ErrorKind::io, "unsupported checkpoint version " + std::to_string(version));
    const std::uint64_t digest = r.u64();
    Checkpoint ck;
    ck.config = config_from_json(r.str());
    if (config_digest(ck.config) != digest) fail(ErrorKind::checksum, "checkpoint config digest mismatch");
    if (expected && !(*expected == ck.config))
        fail(ErrorKind::config, "checkpoint config " + config_to_json(ck.config) + " does not match expected " +
                                    config_to_json(*expected));

    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string path = r.str();
        Shape shape(r.u32());
        for (auto &e : shape) e = r.u64();
        Grid g(shape);
        for (auto &v : g.data()) v = r.f64();
        ck.params.values.emplace(std::move(path), std::move(g));
    }
    const std::uint32_t m = r.u32();
    for (std::uint32_t i = 0; i < m; ++i) {
        std::string path = r.str();
        kernels::BatchNormStats s;
        s.updated = r.u8() != 0;
        const std::size_t c = r.u32();
        s.running_mean = Grid({c});
        s.running_var = Grid({c});
        for (auto &v : s.running_mean.data()) v = r.f64();
        for (auto &v : s.running_var.data()) v = r.f64();
        ck.params.norm_stats.emplace(std::move(path), std::move(s));
    }
    if (r.remaining() != 0) fail(ErrorKind::io, "trailing bytes in checkpoint");

    for (const ParamSpec &spec : param_specs(ck.config)) {
        auto it = ck.params.values.find(spec.path);
        if (it == ck.params.values.end() || it->second.shape() != spec.shape)
            fail(ErrorKind::config, "checkpoint parameter '" + spec.path + "' missing or mis-shaped");
    }
    if (ck.params.values.size() != param_specs(ck.config).size())
        fail(ErrorKind::config, "checkpoint holds parameters the config does not define");
    for (const auto &path : batch_norm_paths(ck.config))
        if (!ck.params.norm_stats.count(path))
            fail(ErrorKind::config, "checkpoint lacks batch-norm statistics for '" + path + "'");
    return ck;
}

void save_checkpoint(const ModelConfig &cfg, const ParameterSet &params, const std::string &path) {
    write_file(path, encode_checkpoint(cfg, params));
}

Checkpoint load_checkpoint(const std::string &path, const std::optional<ModelConfig> &expected) {
    return decode_checkpoint(read_file(path), expected);
}

}  // namespace spose
