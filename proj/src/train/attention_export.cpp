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

#include "train/attention_export.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "model/model.hpp"
#include "numerics/error.hpp"

namespace spose {

void write_pgm(const std::string &path, const std::vector<double> &values, std::size_t rows, std::size_t cols) {
    require(values.size() == rows * cols && rows > 0 && cols > 0, ErrorKind::dimension, "write_pgm: bad map size");
    double hi = 0.0;
    for (double v : values) hi = std::max(hi, v);
    std::ofstream os(path, std::ios::binary);
    require(bool(os), ErrorKind::io, "cannot open " + path + " for writing");
    os << "P5\n" << cols << ' ' << rows << "\n255\n";
    for (double v : values) {
        const double scaled = hi > 0.0 ? 255.0 * v / hi : 0.0;
        os.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(scaled, 0.0, 255.0)))));
    }
    require(bool(os), ErrorKind::io, "failed writing " + path);
}

std::vector<std::string> export_attention(const ModelConfig &cfg, const ParameterSet &params,
                                          const PoseSequenceSample &sample, const std::string &out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    require(!ec, ErrorKind::io, "cannot create " + out_dir + ": " + ec.message());

    const ForwardOutput out = predict(cfg, params, sample.input2d, true);
    std::vector<std::string> written;
    for (const AttentionRecord &rec : out.attention) {
        const Grid &m = rec.maps;  // [1, h, L, L]
        const std::size_t heads = m.dim(1), L = m.dim(2);
        for (std::size_t k = 0; k < heads; ++k) {
            const std::string stem = (std::filesystem::path(out_dir) /
                                      (rec.module + "_layer" + std::to_string(rec.layer) + "_head" + std::to_string(k)))
                                         .string();
            std::vector<double> map(m.data().begin() + k * L * L, m.data().begin() + (k + 1) * L * L);
            std::ofstream csv(stem + ".csv");
            require(bool(csv), ErrorKind::io, "cannot open " + stem + ".csv for writing");
            csv << std::setprecision(17);
            for (std::size_t i = 0; i < L; ++i) {
                for (std::size_t j = 0; j < L; ++j) csv << (j ? "," : "") << map[i * L + j];
                csv << '\n';
            }
            require(bool(csv), ErrorKind::io, "failed writing " + stem + ".csv");
            write_pgm(stem + ".pgm", map, L, L);
            written.push_back(stem + ".csv");
            written.push_back(stem + ".pgm");
        }
    }
    return written;
}

}  // namespace spose
