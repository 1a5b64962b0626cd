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

#include "envanim/tensor.hpp"

namespace envanim {

/// Peak signal-to-noise ratio in dB for [0,1] data; identical inputs cap at 99.
double psnr(const Tensor& a, const Tensor& b);

/// Mean local SSIM over valid 11x11 window positions (Gaussian sigma 1.5,
/// C1=0.01^2, C2=0.03^2). Inputs are [3,H,W] or [H,W] in [0,1]; color images
/// are reduced to luma with Rec.601 weights first.
double ssim(const Tensor& a, const Tensor& b);

/// Mean over clip boundaries of the mean absolute difference between the last
/// frame of clip i and the first frame of clip i+1. `video` is [F,3,H,W] with
/// F a multiple of clip_len; needs at least two clips.
double boundary_discontinuity(const Tensor& video, int64_t clip_len);

/// Frame-averaged PSNR/SSIM between two videos [N,3,H,W].
struct VideoScores {
    double psnr = 0.0;
    double ssim = 0.0;
};
VideoScores video_scores(const Tensor& a, const Tensor& b);

}  // namespace envanim
