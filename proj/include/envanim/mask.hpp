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

#include <vector>

#include "envanim/tensor.hpp"

namespace envanim {

/// Number of vertical (k_h) and horizontal (k_w) blocks the mask grid is
/// partitioned into before per-block max propagation.
struct BlockCoefficients {
    int64_t k_h = 1;
    int64_t k_w = 1;
    bool operator==(const BlockCoefficients& o) const { return k_h == o.k_h && k_w == o.k_w; }
};

/// Character mask inside its bounding box. `grid` is the bbox-cropped mask;
/// `bbox` locates the crop in frame coordinates.
struct CharacterMask {
    ByteGrid grid;
    Box bbox;
};

/// Block-max dilation of a character mask: constant on every partition block,
/// elementwise >= the source mask.
struct FormulatedMask {
    ByteGrid grid;
    BlockCoefficients source_coeffs;
    bool empty_input = false;  // set instead of throwing when the mask had no pixels
};

/// Partitions [0,h) x [0,w) into k_h x k_w rectangles. Balanced split: the
/// first (h mod k_h) row bands get the ceil-sized height, likewise columns.
std::vector<Box> partition(int64_t h, int64_t w, const BlockCoefficients& coeffs);

/// Per-block max propagated to every pixel of the block (shape-agnostic mask).
FormulatedMask formulate_mask(const CharacterMask& mask, const BlockCoefficients& coeffs);

/// Inference-time rule: one block per ~10 pixels on each axis, clamped to [1, dim].
BlockCoefficients inference_coefficients(int64_t h, int64_t w);

/// Training-time rule: k_h uniform over {2..h-1}, k_w uniform over {2..w-1}.
BlockCoefficients sample_training_coefficients(int64_t h, int64_t w, Rng& rng);

/// Full-frame convenience: crops the tight bbox of `frame_mask`, formulates it,
/// and pastes the result back; pixels outside the bbox stay zero. Coefficients
/// are clamped to the bbox dimensions. Returns all-zeros with `empty_input`
/// when the frame mask has no set pixels.
FormulatedMask formulated_region(const ByteGrid& frame_mask, const BlockCoefficients& coeffs);

/// Filled bounding-box region of `frame_mask` (the "bbox" ablation).
ByteGrid bbox_region(const ByteGrid& frame_mask);

}  // namespace envanim
