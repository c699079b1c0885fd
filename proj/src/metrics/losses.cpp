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

#include "metrics/losses.hpp"

#include <cmath>

namespace spose {

namespace {

double norm_sum(const Grid &pred, const Grid &gt, const char *what) {
    require(pred.shape() == gt.shape(), ErrorKind::dimension,
            std::string(what) + ": shapes " + shape_str(pred.shape()) + " and " + shape_str(gt.shape()) + " differ");
    require(pred.shape().back() == 3, ErrorKind::dimension, std::string(what) + ": last axis must be 3");
    double total = 0.0;
    for (std::size_t r = 0; r < rows_of(pred); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            const double d = gt[r * 3 + c] - pred[r * 3 + c];
            s += d * d;
        }
        total += std::sqrt(s);
    }
    return total;
}

}  // namespace

double sequence_loss(const Grid &pred, const Grid &gt) { return norm_sum(pred, gt, "sequence_loss"); }

Var sequence_loss(Var pred, const Grid &gt) {
    require(pred.shape().back() == 3, ErrorKind::dimension, "sequence_loss: last axis must be 3");
    return ag::l2_norm_sum(pred, gt);
}

double single_frame_loss(const Grid &pred, const Grid &gt) { return norm_sum(pred, gt, "single_frame_loss"); }

Var single_frame_loss(Var pred, const Grid &gt) {
    require(pred.shape().back() == 3, ErrorKind::dimension, "single_frame_loss: last axis must be 3");
    return ag::l2_norm_sum(pred, gt);
}

LossWeights effective_weights(double lambda_f, double lambda_s, Mode mode) {
    require(lambda_f >= 0.0 && lambda_s >= 0.0, ErrorKind::config, "loss weights must be non-negative");
    LossWeights w{lambda_f, lambda_s};
    if (mode == Mode::single || mode == Mode::full) w.first = 0.0;
    require(w.first > 0.0 || w.second > 0.0, ErrorKind::config, "both loss weights are zero");
    return w;
}

double total_loss(double first, double second, double lambda_f, double lambda_s, Mode mode) {
    const LossWeights w = effective_weights(lambda_f, lambda_s, mode);
    return w.first * first + w.second * second;
}

}  // namespace spose
