// Copyright 2026 The envanim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace envanim {

/// Dense row-major tensor of doubles. All core math runs in 64-bit so the
/// finite-difference gradient checks exercise the exact training code path.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int64_t> shape);
    Tensor(std::vector<int64_t> shape, double fill);

    static Tensor zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<int64_t> shape, double v) { return Tensor(std::move(shape), v); }

    const std::vector<int64_t>& shape() const { return shape_; }
    int64_t dim(int i) const { return shape_.at(static_cast<size_t>(i)); }
    int rank() const { return static_cast<int>(shape_.size()); }
    int64_t size() const { return static_cast<int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
    double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

    double& at(int64_t a, int64_t b) { return data_[static_cast<size_t>(a * shape_[1] + b)]; }
    double at(int64_t a, int64_t b) const { return data_[static_cast<size_t>(a * shape_[1] + b)]; }
    double& at(int64_t a, int64_t b, int64_t c) {
        return data_[static_cast<size_t>((a * shape_[1] + b) * shape_[2] + c)];
    }
    double at(int64_t a, int64_t b, int64_t c) const {
        return data_[static_cast<size_t>((a * shape_[1] + b) * shape_[2] + c)];
    }
    double& at(int64_t a, int64_t b, int64_t c, int64_t d) {
        return data_[static_cast<size_t>(((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d)];
    }
    double at(int64_t a, int64_t b, int64_t c, int64_t d) const {
        return data_[static_cast<size_t>(((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d)];
    }

    /// Metadata-only reshape; element count must match.
    Tensor reshaped(std::vector<int64_t> shape) const;

    void fill(double v);
    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
    bool all_finite() const;

    std::string shape_str() const;

private:
    std::vector<int64_t> shape_;
    std::vector<double> data_;
};

int64_t shape_numel(const std::vector<int64_t>& shape);

/// Binary mask / label grid, h rows by w columns, row-major.
struct ByteGrid {
    int64_t h = 0;
    int64_t w = 0;
    std::vector<uint8_t> v;

    ByteGrid() = default;
    ByteGrid(int64_t h_, int64_t w_, uint8_t fill = 0)
        : h(h_), w(w_), v(static_cast<size_t>(h_ * w_), fill) {}

    uint8_t& at(int64_t r, int64_t c) { return v[static_cast<size_t>(r * w + c)]; }
    uint8_t at(int64_t r, int64_t c) const { return v[static_cast<size_t>(r * w + c)]; }

    int64_t count() const;
    bool operator==(const ByteGrid& o) const { return h == o.h && w == o.w && v == o.v; }
};

/// Rectangle in frame coordinates, half-open on both axes.
struct Box {
    int64_t top = 0;
    int64_t left = 0;
    int64_t height = 0;
    int64_t width = 0;

    int64_t bottom() const { return top + height; }
    int64_t right() const { return left + width; }
    bool operator==(const Box& o) const {
        return top == o.top && left == o.left && height == o.height && width == o.width;
    }
};

/// Tight bounding box of the set pixels; height/width zero when the grid is empty.
Box tight_bbox(const ByteGrid& grid);

/// Union of two same-shape masks.
ByteGrid mask_union(const ByteGrid& a, const ByteGrid& b);

/// Deterministic random source. Distributions are implemented here rather
/// than with std::*_distribution so that sequences are pinned to this code,
/// not to a particular standard library.
class Rng {
public:
    explicit Rng(uint64_t seed);

    /// Derives an independent stream from (seed, purpose, index).
    static Rng stream(uint64_t seed, uint64_t purpose, uint64_t index = 0);

    uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi] inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi);
    /// Standard normal via Box-Muller.
    double normal();

    void fill_normal(Tensor& t);
    void fill_uniform(Tensor& t, double lo, double hi);

    std::string state_string() const;
    void set_state_string(const std::string& s);

private:
    uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace envanim
