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
#include <map>
#include <ostream>
#include <string>

#include "numerics/grid.hpp"

namespace spose {

// Protocol #1: mean Euclidean joint error over every frame and joint.
// Inputs [..., J, 3], root-relative.
double mpjpe(const Grid &pred, const Grid &gt);

struct ProcrustesInfo {
    std::size_t frames = 0;
    std::size_t degenerate_frames = 0;  // aligned by translation only
};

// Protocol #2: per frame, align the prediction to the ground truth with the
// optimal similarity transform (translation, proper rotation, uniform
// scale), then MPJPE. Inputs [J, 3] or [F, J, 3].
double p_mpjpe(const Grid &pred, const Grid &gt, ProcrustesInfo *info = nullptr);

// Similarity-aligned copy of a single frame [J, 3].
Grid procrustes_align(const Grid &pred, const Grid &gt, bool *degenerate = nullptr);

// MPJPE of first temporal differences; inputs [F, J, 3] with F >= 2.
double mpjve(const Grid &pred_seq, const Grid &gt_seq);

struct ActionMetrics {
    double mpjpe = 0.0;
    double p_mpjpe = 0.0;
    double mpjve = 0.0;
    std::size_t frames = 0;
};

// Averages are the unweighted mean over actions, matching the per-action
// table layout ("Avg." column).
struct MetricReport {
    double mpjpe = 0.0;
    double p_mpjpe = 0.0;
    double mpjve = 0.0;
    std::map<std::string, ActionMetrics> per_action;

    void finalize_average();
};

// One row per action tag, then "Avg.". Values printed with full precision.
void write_metric_csv(std::ostream &os, const MetricReport &report);

}  // namespace spose
