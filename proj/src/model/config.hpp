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
#include <cstdint>
#include <string>
#include <vector>

namespace spose {

// Supervision scheme. The two "-to-" forms supervise both the intermediate
// (VTE) head and the final head; `full` and `single` supervise only the
// final head.
enum class Mode {
    full,
    single,
    full_to_full,
    single_to_single,
    full_to_single,
};

const char *mode_name(Mode mode);
Mode parse_mode(const std::string &name);

enum class StackKind { vanilla, strided };
enum class HeadKind { sequence, single };

struct ModelConfig {
    std::size_t T = 27;   // frames per window
    std::size_t J = 17;   // joints
    std::size_t d_m = 256;
    std::size_t d_f = 512;
    std::size_t h = 8;
    std::size_t N1 = 3;
    std::size_t N2 = 3;
    std::size_t k_f = 1;
    std::size_t k_m = 3;
    std::size_t s_f = 1;
    std::vector<std::size_t> s_m{3, 3, 3};
    double dropout = 0.1;
    double lambda_f = 1.0;
    double lambda_s = 1.0;
    Mode mode = Mode::full_to_single;

    // Receptive-field presets with the published stride lists.
    static ModelConfig for_frames(std::size_t frames);

    // Throws a config error naming the first violated invariant.
    void validate() const;

    // Layers after the first N1 are strided for the single-frame schemes and
    // vanilla for `full` / `full_to_full`.
    StackKind second_stack() const;
    std::size_t target_index() const { return T / 2; }

    // Input length of each strided layer followed by the final length:
    // {T, ceil(T/s1), ..., 1}. Empty when the second stack is vanilla.
    std::vector<std::size_t> strided_lengths() const;

    bool operator==(const ModelConfig &) const = default;
};

// Which regression heads exist and how each is supervised.
struct HeadPlan {
    bool present = false;
    HeadKind kind = HeadKind::sequence;
    double weight = 0.0;
};

struct LossPlan {
    HeadPlan head1;  // on the output of the first N1 vanilla layers
    HeadPlan head2;  // on the output of the second stack
    // Head whose center-frame prediction is the model's answer.
    bool final_is_head2 = true;
};

LossPlan plan_losses(const ModelConfig &cfg);

// Canonical JSON text (sorted keys, fixed formatting) and its digest.
std::string config_to_json(const ModelConfig &cfg);
ModelConfig config_from_json(const std::string &text);
std::uint64_t config_digest(const ModelConfig &cfg);

}  // namespace spose
