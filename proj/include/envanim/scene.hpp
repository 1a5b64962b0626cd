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

#include <array>
#include <optional>
#include <vector>

#include "envanim/clip.hpp"
#include "envanim/mask.hpp"

namespace envanim {

enum class MaskMode { ShapeAgnostic, Precise, Bbox };

/// Driving frames with the generation region blanked to the fill value.
struct EnvironmentSequence {
    Tensor frames;                        // [N,3,H,W]; equals source outside region_masks
    std::vector<ByteGrid> region_masks;   // the formulated masks per frame
    std::vector<uint8_t> empty_frames;    // 1 where the character mask was empty
};

struct ObjectSequence {
    Tensor frames;  // object pixels, fill elsewhere
    std::vector<ByteGrid> masks;
};

struct CharacterSequence {
    Tensor frames;  // character pixels, fill elsewhere
    std::vector<ByteGrid> masks;
};

struct Decomposition {
    CharacterSequence character;
    EnvironmentSequence environment;
    ObjectSequence object;
};

/// Splits a clip into character / environment / object sequences. The
/// generation region is derived per frame from clip.generation_basis() using
/// `coeffs` (clamped to each frame's bbox) under the given mask mode; object
/// pixels inside the region are removed too and re-enter via object injection.
Decomposition decompose_clip(const VideoClip& clip, const BlockCoefficients& coeffs,
                             const std::array<double, 3>& fill,
                             MaskMode mode = MaskMode::ShapeAgnostic);

/// Per-frame coefficient variant: coeffs[f] applies to frame f.
Decomposition decompose_clip(const VideoClip& clip, const std::vector<BlockCoefficients>& coeffs,
                             const std::array<double, 3>& fill,
                             MaskMode mode = MaskMode::ShapeAgnostic);

/// Character centered (integer translation of the bbox center to the image
/// center) and composited over the provided background.
struct ReferenceImage {
    Tensor image;  // [3,H,W]
    int64_t provenance = -1;
};

ReferenceImage composite_reference(const VideoClip& clip, int64_t frame_index,
                                   const Tensor& background);

/// Samples a solid-color background from `rng`, then composites.
ReferenceImage build_reference_image(const VideoClip& clip, int64_t frame_index, Rng& rng);

/// Bottom-center of the union character bbox across frames ("foot anchor").
std::optional<std::pair<double, double>> foot_anchor(const VideoClip& clip);

/// Pixel-space scale augmentation: character and object content rescaled by
/// bilinear resampling about `anchor` (row, col) and recomposited; masks use
/// nearest-neighbor. The returned clip's region_basis is the union of the
/// original and scaled character masks. Vacated pixels keep the source values;
/// they always fall inside the recorded union region.
VideoClip random_scale_augment(const VideoClip& clip, double scale,
                               std::pair<double, double> anchor);

/// One coefficient pair for a whole clip, sampled from the union bbox of the
/// generation basis. Falls back to (1,1) when every frame is empty.
BlockCoefficients sample_clip_coefficients(const VideoClip& clip, Rng& rng);

}  // namespace envanim
