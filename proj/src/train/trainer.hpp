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
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "metrics/metrics.hpp"
#include "model/config.hpp"
#include "model/params.hpp"
#include "synth/dataset.hpp"
#include "synth/skeleton.hpp"

namespace spose {

// The network regresses meters; datasets and metrics use millimeters.
inline constexpr double kMillimetersPerModelUnit = 1000.0;

struct TrainConfig {
    ModelConfig model;
    double lr0 = 0.001;
    double lr_decay = 0.95;  // multiplied in after every epoch
    std::size_t epochs = 20;
    std::size_t batch_size = 128;
    std::uint64_t seed = 0;
    bool flip_augment = true;  // random horizontal flip per training sample
    bool eval_flip = true;     // flip averaging during evaluation
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const;
    double lr_at(std::size_t epoch) const;
};

// Model keys (as in ModelConfig) and training keys share one flat object.
TrainConfig train_config_from_json(const std::string &text);
std::string train_config_to_json(const TrainConfig &cfg);

struct EpochLog {
    std::size_t epoch = 0;
    double lr = 0.0;
    // Summed losses over the epoch (model units), and the mean per joint
    // per supervised frame in millimeters for monitoring.
    double loss_first = 0.0;
    double loss_second = 0.0;
    double loss_total = 0.0;
    double loss_first_mm = 0.0;
    double loss_second_mm = 0.0;
    MetricReport eval;
    double seconds = 0.0;  // wall time; not part of the deterministic log
};

struct RunLog {
    std::vector<EpochLog> epochs;
    std::size_t best_epoch = 0;
    std::string diagnostic;  // set when training aborted
};

// CSV with one row per epoch. Wall time is written only when requested so
// the default log is bit-reproducible.
void write_run_log_csv(std::ostream &os, const RunLog &log, bool include_time = false);

struct TrainResult {
    ParameterSet best_params;
    ParameterSet final_params;
    RunLog log;
    bool aborted = false;
};

using EpochCallback = std::function<void(const EpochLog &)>;

// Trains on `train_set`, selecting the epoch with the lowest MPJPE on
// `eval_set` (the training set when absent). A non-finite loss stops the run
// with `aborted` set and the last good parameters kept as best_params.
TrainResult train(const TrainConfig &cfg, const Dataset &train_set, const Dataset *eval_set = nullptr,
                  const SkeletonSpec &spec = SkeletonSpec::human17(), const EpochCallback &on_epoch = {});

// Center-frame predictions in millimeters, [N, J, 3], one per sample. With
// flip averaging the prediction is the mean of the plain pass and the
// un-flipped pass on flipped input.
Grid predict_centers(const ModelConfig &cfg, const ParameterSet &params, const Dataset &ds, bool flip_averaging,
                     const SkeletonSpec &spec = SkeletonSpec::human17());

// Metrics from per-sample center predictions [N, J, 3] (mm). MPJVE stitches
// the predictions of each sequence in frame order before differencing.
MetricReport score_predictions(const Grid &centers_mm, const Dataset &ds);

MetricReport evaluate(const ModelConfig &cfg, const ParameterSet &params, const Dataset &ds, bool flip_averaging,
                      const SkeletonSpec &spec = SkeletonSpec::human17());

// Worker cap from SL_THREADS (default: hardware concurrency).
std::size_t worker_count();

}  // namespace spose
