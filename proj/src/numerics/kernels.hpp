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

#include <cstddef>
#include <vector>

#include "numerics/grid.hpp"
#include "numerics/rng.hpp"

// Forward and backward kernels on plain grids. These are pure: the autodiff
// tape composes them but they are also usable directly.
namespace spose::kernels {

// x[..., Din] * w[Din, Dout] + b[Dout]
Grid linear(const Grid &x, const Grid &w, const Grid &b);
struct LinearGrads {
    Grid dx, dw, db;
};
LinearGrads linear_backward(const Grid &x, const Grid &w, const Grid &dy);

// Output length of a stride-s convolution padded with floor(K/2) zeros per
// side, for odd K. Equal to ceil(T / s).
std::size_t strided_length(std::size_t length, std::size_t stride);

// x[B, T, Din] (or [T, Din]), kernel[K, Din, Dout], bias[Dout].
Grid conv1d_strided(const Grid &x, const Grid &kernel, const Grid &bias, std::size_t stride);
struct ConvGrads {
    Grid dx, dkernel, dbias;
};
ConvGrads conv1d_strided_backward(const Grid &x, const Grid &kernel, std::size_t stride, const Grid &dy);

// Window = stride = s, right-padded with -inf. `argmax` receives the flat
// source index chosen for each output.
Grid maxpool1d(const Grid &x, std::size_t stride, std::vector<std::size_t> *argmax = nullptr);
Grid maxpool1d_backward(const Shape &x_shape, const std::vector<std::size_t> &argmax, const Grid &dy);

Grid softmax(const Grid &x, std::size_t axis);
Grid softmax_backward(const Grid &y, const Grid &dy, std::size_t axis);

Grid relu(const Grid &x);

struct NormSaved {
    Grid xhat;
    std::vector<double> inv_std;
};

// Normalizes every row over the last axis.
Grid layer_norm(const Grid &x, const Grid &gain, const Grid &shift, double eps = 1e-5, NormSaved *saved = nullptr);
struct NormGrads {
    Grid dx, dgain, dshift;
};
NormGrads layer_norm_backward(const NormSaved &saved, const Grid &gain, const Grid &dy);

struct BatchNormStats {
    Grid running_mean;
    Grid running_var;
    // False until the first train-mode update; eval before that uses the
    // initial statistics (mean 0, var 1).
    bool updated = false;

    static BatchNormStats fresh(std::size_t channels) {
        return {Grid({channels}, 0.0), Grid({channels}, 1.0), false};
    }
};

// Channels are the last axis; statistics run over all leading rows.
// Train mode normalizes by the batch statistics (population variance) and
// folds the unbiased variance into the running estimate.
Grid batch_norm_train(const Grid &x, const Grid &gain, const Grid &shift, BatchNormStats &stats,
                      double momentum = 0.1, double eps = 1e-5, NormSaved *saved = nullptr);
Grid batch_norm_eval(const Grid &x, const Grid &gain, const Grid &shift, const BatchNormStats &stats,
                     double eps = 1e-5);
NormGrads batch_norm_train_backward(const NormSaved &saved, const Grid &gain, const Grid &dy);

// Inverted dropout. `mask` receives the per-entry multiplier (0 or 1/(1-p)).
Grid dropout(const Grid &x, double p, RngStream &rng, bool train, Grid *mask = nullptr);

// Multi-head scaled dot-product attention over q, k, v of shape [B, L, D];
// D is split into `heads` contiguous slices. Returns [B, L, D] with heads
// concatenated along the last axis. `maps` receives the softmax weights as
// [B, heads, L, L].
Grid attention(const Grid &q, const Grid &k, const Grid &v, std::size_t heads, Grid *maps = nullptr);
struct AttentionGrads {
    Grid dq, dk, dv;
};
AttentionGrads attention_backward(const Grid &q, const Grid &k, const Grid &v, const Grid &maps, std::size_t heads,
                                  const Grid &dy);

}  // namespace spose::kernels
