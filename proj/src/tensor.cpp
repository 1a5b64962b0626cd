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

#include "envanim/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace envanim {

int64_t shape_numel(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
        if (d < 0) throw std::invalid_argument("negative tensor dimension");
        n *= d;
    }
    return n;
}

Tensor::Tensor(std::vector<int64_t> shape)
    : shape_(std::move(shape)), data_(static_cast<size_t>(shape_numel(shape_)), 0.0) {}

Tensor::Tensor(std::vector<int64_t> shape, double fill)
    : shape_(std::move(shape)), data_(static_cast<size_t>(shape_numel(shape_)), fill) {}

Tensor Tensor::reshaped(std::vector<int64_t> shape) const {
    if (shape_numel(shape) != size())
        throw std::invalid_argument("reshape: element count mismatch (" + shape_str() + ")");
    Tensor out = *this;
    out.shape_ = std::move(shape);
    return out;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << "]";
    return os.str();
}

int64_t ByteGrid::count() const {
    int64_t n = 0;
    for (uint8_t x : v) n += (x != 0);
    return n;
}

Box tight_bbox(const ByteGrid& grid) {
    int64_t r0 = grid.h, r1 = -1, c0 = grid.w, c1 = -1;
    for (int64_t r = 0; r < grid.h; ++r) {
        for (int64_t c = 0; c < grid.w; ++c) {
            if (grid.at(r, c)) {
                r0 = std::min(r0, r);
                r1 = std::max(r1, r);
                c0 = std::min(c0, c);
                c1 = std::max(c1, c);
            }
        }
    }
    if (r1 < 0) return Box{0, 0, 0, 0};
    return Box{r0, c0, r1 - r0 + 1, c1 - c0 + 1};
}

ByteGrid mask_union(const ByteGrid& a, const ByteGrid& b) {
    if (a.h != b.h || a.w != b.w) throw std::invalid_argument("mask_union: shape mismatch");
    ByteGrid out(a.h, a.w);
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = (a.v[i] || b.v[i]) ? 1 : 0;
    return out;
}

namespace {

uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

Rng Rng::stream(uint64_t seed, uint64_t purpose, uint64_t index) {
    uint64_t sm = seed;
    uint64_t a = splitmix64(sm);
    sm = a ^ (purpose * 0x9e3779b97f4a7c15ULL);
    uint64_t b = splitmix64(sm);
    sm = b ^ (index + 0x2545f4914f6cdd1dULL);
    return Rng(splitmix64(sm));
}

uint64_t Rng::next_u64() {
    // xoshiro256**
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<int64_t>(next_u64());  // full 64-bit range
    // Rejection sampling keeps the draw exactly uniform.
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return lo + static_cast<int64_t>(x % span);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

void Rng::fill_normal(Tensor& t) {
    for (int64_t i = 0; i < t.size(); ++i) t[i] = normal();
}

void Rng::fill_uniform(Tensor& t, double lo, double hi) {
    for (int64_t i = 0; i < t.size(); ++i) t[i] = uniform(lo, hi);
}

std::string Rng::state_string() const {
    std::ostringstream os;
    os << s_[0] << " " << s_[1] << " " << s_[2] << " " << s_[3] << " " << has_spare_ << " ";
    os.precision(17);
    os << spare_;
    return os.str();
}

void Rng::set_state_string(const std::string& s) {
    std::istringstream is(s);
    if (!(is >> s_[0] >> s_[1] >> s_[2] >> s_[3] >> has_spare_ >> spare_))
        throw std::invalid_argument("Rng: malformed state string");
}

}  // namespace envanim
