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

#include "envanim/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace envanim {

namespace {

// Balanced 1-D split of `extent` into `parts` bands, ceil-sized bands first.
// Returns the band boundaries (parts + 1 entries).
std::vector<int64_t> band_edges(int64_t extent, int64_t parts) {
    std::vector<int64_t> edges(static_cast<size_t>(parts) + 1, 0);
    int64_t base = extent / parts;
    int64_t rem = extent % parts;
    for (int64_t i = 0; i < parts; ++i)
        edges[static_cast<size_t>(i) + 1] = edges[static_cast<size_t>(i)] + base + (i < rem ? 1 : 0);
    return edges;
}

void check_coeff(int64_t k, int64_t dim, const char* name) {
    if (k < 1 || k > dim)
        throw std::invalid_argument(std::string("partition: coefficient ") + name + "=" +
                                    std::to_string(k) + " outside [1, " + std::to_string(dim) + "]");
}

}  // namespace

std::vector<Box> partition(int64_t h, int64_t w, const BlockCoefficients& coeffs) {
    if (h < 1 || w < 1) throw std::invalid_argument("partition: h and w must be positive");
    check_coeff(coeffs.k_h, h, "k_h");
    check_coeff(coeffs.k_w, w, "k_w");
    auto rows = band_edges(h, coeffs.k_h);
    auto cols = band_edges(w, coeffs.k_w);
    std::vector<Box> blocks;
    blocks.reserve(static_cast<size_t>(coeffs.k_h * coeffs.k_w));
    for (int64_t i = 0; i < coeffs.k_h; ++i)
        for (int64_t j = 0; j < coeffs.k_w; ++j)
            blocks.push_back(Box{rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)],
                                 rows[static_cast<size_t>(i) + 1] - rows[static_cast<size_t>(i)],
                                 cols[static_cast<size_t>(j) + 1] - cols[static_cast<size_t>(j)]});
    return blocks;
}

FormulatedMask formulate_mask(const CharacterMask& mask, const BlockCoefficients& coeffs) {
    FormulatedMask out;
    out.source_coeffs = coeffs;
    out.grid = ByteGrid(mask.grid.h, mask.grid.w);
    if (mask.grid.count() == 0) {
        out.empty_input = true;  // degenerate frames occur in clips; never throw here
        return out;
    }
    for (const Box& blk : partition(mask.grid.h, mask.grid.w, coeffs)) {
        uint8_t m = 0;
        for (int64_t r = blk.top; r < blk.bottom() && !m; ++r)
            for (int64_t c = blk.left; c < blk.right(); ++c)
                if (mask.grid.at(r, c)) {
                    m = 1;
                    break;
                }
        if (m)
            for (int64_t r = blk.top; r < blk.bottom(); ++r)
                for (int64_t c = blk.left; c < blk.right(); ++c) out.grid.at(r, c) = 1;
    }
    return out;
}

BlockCoefficients inference_coefficients(int64_t h, int64_t w) {
    if (h < 1 || w < 1) throw std::invalid_argument("inference_coefficients: dims must be positive");
    auto rule = [](int64_t d) {
        int64_t k = std::llround(static_cast<double>(d) / 10.0);
        return std::clamp<int64_t>(k, 1, d);
    };
    return BlockCoefficients{rule(h), rule(w)};
}

BlockCoefficients sample_training_coefficients(int64_t h, int64_t w, Rng& rng) {
    if (h < 3 || w < 3)
        throw std::invalid_argument("sample_training_coefficients: need h >= 3 and w >= 3, got " +
                                    std::to_string(h) + "x" + std::to_string(w));
    // Open interval (1, dim): integers {2 .. dim-1}.
    return BlockCoefficients{rng.uniform_int(2, h - 1), rng.uniform_int(2, w - 1)};
}

FormulatedMask formulated_region(const ByteGrid& frame_mask, const BlockCoefficients& coeffs) {
    FormulatedMask out;
    out.source_coeffs = coeffs;
    out.grid = ByteGrid(frame_mask.h, frame_mask.w);
    Box bbox = tight_bbox(frame_mask);
    if (bbox.height == 0) {
        out.empty_input = true;
        return out;
    }
    CharacterMask crop;
    crop.bbox = bbox;
    crop.grid = ByteGrid(bbox.height, bbox.width);
    for (int64_t r = 0; r < bbox.height; ++r)
        for (int64_t c = 0; c < bbox.width; ++c)
            crop.grid.at(r, c) = frame_mask.at(bbox.top + r, bbox.left + c);
    BlockCoefficients clamped{std::min(coeffs.k_h, bbox.height), std::min(coeffs.k_w, bbox.width)};
    FormulatedMask local = formulate_mask(crop, clamped);
    for (int64_t r = 0; r < bbox.height; ++r)
        for (int64_t c = 0; c < bbox.width; ++c)
            out.grid.at(bbox.top + r, bbox.left + c) = local.grid.at(r, c);
    out.source_coeffs = clamped;
    return out;
}

ByteGrid bbox_region(const ByteGrid& frame_mask) {
    ByteGrid out(frame_mask.h, frame_mask.w);
    Box bbox = tight_bbox(frame_mask);
    for (int64_t r = bbox.top; r < bbox.bottom(); ++r)
        for (int64_t c = bbox.left; c < bbox.right(); ++c) out.at(r, c) = 1;
    return out;
}

}  // namespace envanim
