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

#include <string>
#include <vector>

#include "model/config.hpp"
#include "model/params.hpp"
#include "synth/dataset.hpp"

namespace spose {

// Runs one sample in eval mode and writes every layer's h x L x L attention
// weights to `out_dir` as {module}_layer{n}_head{k}.csv plus a binary PGM
// image of the same map (row = query, column = key; brightest = largest
// weight in that map). Returns the written paths in order.
std::vector<std::string> export_attention(const ModelConfig &cfg, const ParameterSet &params,
                                          const PoseSequenceSample &sample, const std::string &out_dir);

// Writes a [rows, cols] map scaled so its maximum is 255.
void write_pgm(const std::string &path, const std::vector<double> &values, std::size_t rows, std::size_t cols);

}  // namespace spose
