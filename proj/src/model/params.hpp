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
#include <map>
#include <string>
#include <vector>

#include "model/config.hpp"
#include "numerics/grid.hpp"
#include "numerics/kernels.hpp"

namespace spose {

enum class InitKind { fan_in_uniform, ones, zeros, position };

struct ParamSpec {
    std::string path;
    Shape shape;
    InitKind init = InitKind::fan_in_uniform;
    std::size_t fan_in = 1;
};

// Every learnable array for `cfg`, in path order. The path set depends on
// the config alone.
std::vector<ParamSpec> param_specs(const ModelConfig &cfg);

// Batch-norm layers (each owns running statistics).
std::vector<std::string> batch_norm_paths(const ModelConfig &cfg);

struct ParameterSet {
    std::map<std::string, Grid> values;
    std::map<std::string, kernels::BatchNormStats> norm_stats;

    const Grid &at(const std::string &path) const;
    Grid &at(const std::string &path);
    kernels::BatchNormStats &stats(const std::string &path);

    // Learnable element count (running statistics excluded).
    std::size_t count() const;

    bool operator==(const ParameterSet &other) const;
};

// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); norm gains 1 and
// shifts 0; position tables ~ N(0, 0.02^2). Each array draws from its own
// stream keyed by (seed, path), so the result does not depend on
// construction order.
ParameterSet init_params(const ModelConfig &cfg, std::uint64_t seed);

}  // namespace spose
