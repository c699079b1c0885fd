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

#include "numerics/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spose {

const char *error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::dimension:
            return "dimension";
        case ErrorKind::config:
            return "config";
        case ErrorKind::numeric:
            return "numeric";
        case ErrorKind::io:
            return "io";
        case ErrorKind::checksum:
            return "checksum";
        case ErrorKind::internal:
            return "internal";
    }
    return "unknown";
}

std::size_t shape_size(const Shape &shape) {
    std::size_t n = 1;
    for (auto e : shape) n *= e;
    return n;
}

std::string shape_str(const Shape &shape) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ", ";
        os << shape[i];
    }
    os << ')';
    return os.str();
}

Grid::Grid(Shape shape, double fill) : shape_(std::move(shape)) {
    require(!shape_.empty(), ErrorKind::dimension, "grid needs at least one extent");
    for (auto e : shape_)
        require(e > 0, ErrorKind::dimension, "grid extents must be positive: " + shape_str(shape_));
    data_.assign(shape_size(shape_), fill);
}

Grid::Grid(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    require(!shape_.empty(), ErrorKind::dimension, "grid needs at least one extent");
    for (auto e : shape_)
        require(e > 0, ErrorKind::dimension, "grid extents must be positive: " + shape_str(shape_));
    require(shape_size(shape_) == data_.size(), ErrorKind::dimension,
            "data length " + std::to_string(data_.size()) + " does not match shape " + shape_str(shape_));
}

Grid Grid::reshaped(Shape shape) const {
    Grid g = *this;
    g.reshape(std::move(shape));
    return g;
}

void Grid::reshape(Shape shape) {
    require(shape_size(shape) == data_.size(), ErrorKind::dimension,
            "cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
    shape_ = std::move(shape);
}

void Grid::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Grid::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Grid::check_finite(const std::string &where) const {
    if (!all_finite()) fail(ErrorKind::numeric, "non-finite value in " + where);
}

SeqView seq_view(const Grid &g, const char *op) {
    if (g.rank() == 2) return {1, g.dim(0), g.dim(1)};
    if (g.rank() == 3) return {g.dim(0), g.dim(1), g.dim(2)};
    fail(ErrorKind::dimension, std::string(op) + " expects [T, D] or [B, T, D], got " + shape_str(g.shape()));
}

}  // namespace spose
