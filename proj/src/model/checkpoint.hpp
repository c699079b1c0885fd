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
#include <optional>
#include <string>

#include "model/config.hpp"
#include "model/params.hpp"

namespace spose {

// Layout (little-endian):
//   "SPCK" | u32 version (=1) | u64 config digest | str config JSON
//   | u32 n | n x (str path | u32 rank | u64 extents[rank] | f64 data[])
//   | u32 m | m x (str path | u8 updated | u32 C | f64 mean[C] | f64 var[C])
//   | u64 FNV-1a checksum of all preceding bytes
// where str is u32 length + bytes. Parameters appear in path order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    ModelConfig config;
    ParameterSet params;
};

std::string encode_checkpoint(const ModelConfig &cfg, const ParameterSet &params);
// `expected`, when given, must match the stored config exactly.
Checkpoint decode_checkpoint(std::string_view bytes, const std::optional<ModelConfig> &expected = std::nullopt);

void save_checkpoint(const ModelConfig &cfg, const ParameterSet &params, const std::string &path);
Checkpoint load_checkpoint(const std::string &path, const std::optional<ModelConfig> &expected = std::nullopt);

}  // namespace spose
