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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "model/config.hpp"
#include "model/params.hpp"
#include "numerics/rng.hpp"
#include "numerics/tape.hpp"

namespace spose {

struct AttentionRecord {
    std::string module;  // "vte" or "ste"
    std::size_t layer = 0;
    Grid maps;  // [B, h, L, L], the softmax weights used in the forward pass
};

struct ForwardOptions {
    bool train = false;
    RngStream *rng = nullptr;  // dropout source; required when training with dropout > 0
    bool keep_attention = false;
};

// Binds parameter paths to tape leaves on first use. Training binds a
// mutable set (batch-norm statistics update); evaluation binds a const one.
class ParamBinder {
   public:
    ParamBinder(Tape &tape, ParameterSet &params) : tape_(tape), params_(params), mutable_(&params) {}
    ParamBinder(Tape &tape, const ParameterSet &params) : tape_(tape), params_(params) {}

    Var operator()(const std::string &path);
    kernels::BatchNormStats &mutable_stats(const std::string &path);
    const kernels::BatchNormStats &stats(const std::string &path) const;
    Tape &tape() { return tape_; }

   private:
    Tape &tape_;
    const ParameterSet &params_;
    ParameterSet *mutable_ = nullptr;
    std::map<std::string, Var> bound_;
};

// [B, T, J, 2] -> [B, T, d_m]: flatten joints, width-1 conv, batch norm,
// dropout, ReLU.
Var pose_embedding(ParamBinder &p, const ModelConfig &cfg, Var input, const ForwardOptions &opt);

// Multi-head self-attention over [B, L, d_m] with fused d_m x d_m
// projections.
Var msa(ParamBinder &p, const std::string &prefix, Var z, std::size_t heads, Grid *maps);

// Pre-norm encoder layer: z + MSA(LN(z)), then + FFN(LN(.)).
Var vte_layer(ParamBinder &p, const std::string &prefix, Var z, const ModelConfig &cfg, const ForwardOptions &opt,
              Grid *maps);

// Adds the layer's position table, then the attention block, then
// MaxPool(residual) + CFFN(LN(residual)). Output length ceil(L / stride).
Var ste_layer(ParamBinder &p, const std::string &prefix, Var z, std::size_t stride, const ModelConfig &cfg,
              const ForwardOptions &opt, Grid *maps);

// Batch norm then width-1 conv to J*3: [B, L, d_m] -> [B, L, J, 3].
Var regression_head(ParamBinder &p, const std::string &prefix, Var z, std::size_t joints, const ForwardOptions &opt);

struct GraphOutput {
    std::optional<Var> head1;  // [B, T, J, 3]
    std::optional<Var> head2;  // [B, T, J, 3] (vanilla second stack) or [B, 1, J, 3]
    std::vector<AttentionRecord> attention;
};

GraphOutput forward_graph(ParamBinder &p, const ModelConfig &cfg, Var input, const ForwardOptions &opt);

// Center-frame prediction [B, J, 3] from the final head.
Var final_prediction(const ModelConfig &cfg, const GraphOutput &out);

struct ForwardOutput {
    std::optional<Grid> seq3d;  // sequence prediction when a sequence head exists
    Grid target3d;              // center-frame prediction
    std::vector<AttentionRecord> attention;
};

// Accepts [T, J, 2] or [B, T, J, 2]; outputs drop the batch axis for
// unbatched input. Train mode updates batch-norm statistics in `params`.
ForwardOutput forward(const ModelConfig &cfg, ParameterSet &params, const Grid &input, const ForwardOptions &opt,
                      MacCounter *macs = nullptr);

// Eval-mode forward; pure.
ForwardOutput predict(const ModelConfig &cfg, const ParameterSet &params, const Grid &input,
                      bool keep_attention = false, MacCounter *macs = nullptr);

}  // namespace spose
