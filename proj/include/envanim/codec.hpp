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

/// Fixed invertible pixel <-> latent transform: a space-to-depth permutation.
/// Each p x p spatial patch of a 3-channel frame becomes 3*p*p channels, so
/// decode(encode(x)) == x bitwise and codec error never confounds evaluation.
///
/// Channel layout: latent channel c*p*p + dy*p + dx holds pixel channel c at
/// patch offset (dy, dx).
class LatentCodec {
public:
    explicit LatentCodec(int64_t patch = 4);

    int64_t patch() const { return patch_; }
    int64_t latent_channels() const { return 3 * patch_ * patch_; }

    /// [N,3,H,W] -> [N,3p^2,H/p,W/p]; H and W must be divisible by p.
    Tensor encode(const Tensor& frames) const;
    /// Exact inverse of encode; channel count must equal 3p^2.
    Tensor decode(const Tensor& latents) const;

private:
    int64_t patch_;
};

}  // namespace envanim
