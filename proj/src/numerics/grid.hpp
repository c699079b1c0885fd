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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "numerics/error.hpp"

namespace spose {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape &shape);
std::string shape_str(const Shape &shape);

// Dense row-major array of doubles. All activations, parameters and
// gradients are stored in a Grid.
class Grid {
   public:
    Grid() = default;
    explicit Grid(Shape shape, double fill = 0.0);
    Grid(Shape shape, std::vector<double> data);

    static Grid scalar(double v) { return Grid({1}, {v}); }

    const Shape &shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    const std::vector<double> &values() const { return data_; }

    double &operator[](std::size_t i) { return data_[i]; }
    const double &operator[](std::size_t i) const { return data_[i]; }

    double &at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    double &at(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    // Same data, new shape of equal size.
    Grid reshaped(Shape shape) const;
    void reshape(Shape shape);

    void fill(double v);
    bool all_finite() const;

    // Throws a numeric error naming `where` if any entry is NaN or Inf.
    void check_finite(const std::string &where) const;

    bool operator==(const Grid &other) const = default;

   private:
    Shape shape_;
    std::vector<double> data_;
};

// Leading extents flattened: a [B, T, D] grid is viewed as B*T rows of D.
inline std::size_t rows_of(const Grid &g) { return g.size() / g.shape().back(); }

// Interprets rank-2 [T, D] as a batch of one and rank-3 [B, T, D] directly.
struct SeqView {
    std::size_t batch;
    std::size_t length;
    std::size_t width;
};
SeqView seq_view(const Grid &g, const char *op);

}  // namespace spose
