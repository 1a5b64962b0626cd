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

#include "envanim/clip.hpp"
#include "envanim/nn.hpp"

namespace envanim {

/// Anti-aliased limb rasterization: each bone drawn as a width-2 band
/// (intensity ramps from 1 on the center line to 0 at distance 1) in a fixed
/// per-bone color; overlaps take the channel-wise max. Joints outside the
/// frame are clipped to it; occluded joints suppress their bones.
/// joints: [N,J,3] -> maps [N,3,H,W].
Tensor rasterize_skeleton(const Tensor& joints, int64_t height, int64_t width);

/// Depth kept only inside the binarized skeleton support (any channel != 0).
/// skeleton_maps [N,3,H,W], depth_maps [N,H,W] -> [N,1,H,W].
Tensor structure_depth(const Tensor& skeleton_maps, const Tensor& depth_maps);

/// The raw driving signals for one clip.
struct MotionSequence {
    Tensor skeleton_maps;    // [N,3,H,W]
    Tensor structured_depth; // [N,1,H,W]
};

MotionSequence build_motion_sequence(const VideoClip& clip);

enum class PoseMode { Modulated, SkeletonOnly };

/// Motion feature encoder: two parallel strided conv stacks bring the
/// skeleton map and the structured depth map to latent resolution; per-frame
/// cross-attention merges depth into the skeleton features (skeleton queries,
/// depth keys/values); a temporal convolution follows; the final projection is
/// zero-initialized so the branch contributes nothing at initialization.
class MotionEncoder {
public:
    MotionEncoder() = default;
    MotionEncoder(nn::ParamRegistry& reg, const std::string& prefix, int64_t out_channels,
                  int64_t patch, int heads, int groups, PoseMode mode, Rng& rng);

    /// [N, C_m, H/p, W/p]; inputs at pixel resolution.
    nn::Var operator()(nn::Graph& g, nn::Var skeleton_maps, nn::Var structured_depth,
                       ForwardTrace* trace = nullptr) const;

    PoseMode mode() const { return mode_; }

private:
    struct Stack {
        std::vector<nn::Conv2d> convs;  // stride-2 chain then a stride-1 refine
    };
    nn::Var run_stack(nn::Graph& g, const Stack& s, nn::Var x) const;

    Stack skeleton_stack_, depth_stack_;
    nn::SpatialCrossAttention cross_;
    nn::TemporalConv temporal_;
    nn::Conv2d out_proj_;  // 1x1, zero-initialized
    PoseMode mode_ = PoseMode::Modulated;
};

}  // namespace envanim
