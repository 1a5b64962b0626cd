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

/// Skeleton joint order used throughout: head, neck, torso mid, pelvis,
/// left hand, right hand, left foot, right foot.
enum Joint : int {
    kHead = 0,
    kNeck = 1,
    kTorsoMid = 2,
    kPelvis = 3,
    kLeftHand = 4,
    kRightHand = 5,
    kLeftFoot = 6,
    kRightFoot = 7,
    kJointCount = 8,
};

/// Bone topology as (parent, child) joint index pairs.
const std::vector<std::pair<int, int>>& bone_topology();

/// An occluded joint stores (-1,-1,-1); visible joints have x in [0,W),
/// y in [0,H) and depth in [0,1].
inline bool joint_occluded(double x, double y, double d) { return x < 0 || y < 0 || d < 0; }

/// A fixed-length annotated clip: the unit of training and inference.
struct VideoClip {
    Tensor frames;                          // [N,3,H,W] in [0,1]
    std::vector<ByteGrid> character_masks;  // N binary grids, raster footprint
    std::vector<ByteGrid> object_masks;     // N binary grids
    Tensor skeleton;                        // [N,J,3]: x, y, depth per joint
    Tensor depth;                           // [N,H,W] in [0,1], nearer is smaller
    // Basis for the formulated generation region. Empty means "use
    // character_masks"; scale augmentation fills it with the union of the
    // original and scaled character masks.
    std::vector<ByteGrid> region_basis;
    bool clipped = false;  // augmentation pushed content against frame bounds

    int64_t n() const { return frames.empty() ? 0 : frames.dim(0); }
    int64_t height() const { return frames.dim(2); }
    int64_t width() const { return frames.dim(3); }
    const std::vector<ByteGrid>& generation_basis() const {
        return region_basis.empty() ? character_masks : region_basis;
    }
};

/// Throws std::runtime_error when a structural invariant is violated
/// (shape agreement, binary masks, joints in frame or occluded, occlusion
/// consistency between masks and the depth map).
void validate_clip(const VideoClip& clip);

/// Sub-clip [first, first+count) by frame, annotations included.
VideoClip slice_clip(const VideoClip& clip, int64_t first, int64_t count);

}  // namespace envanim
