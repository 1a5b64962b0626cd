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

#include "envanim/nn.hpp"

namespace envanim {

enum class ObjectMode { Blend, Concat, Off };

/// Lightweight fully convolutional pyramid over object latents: a stride-1
/// trunk stage at latent resolution followed by three stride-2 stages, each
/// scale projected to the width of the decoder stage that consumes it
/// (finest first, bottleneck last).
class ObjectGuider {
public:
    ObjectGuider() = default;
    ObjectGuider(nn::ParamRegistry& reg, const std::string& prefix, int64_t in_channels,
                 int64_t trunk_width, const std::array<int64_t, 4>& consumer_widths, Rng& rng);

    /// levels[0] at input resolution down to levels[3] at 1/8.
    std::array<nn::Var, 4> operator()(nn::Graph& g, nn::Var object_latents) const;

    /// Test hook: disables the nonlinearity so the pyramid is linear in its input.
    void set_linear_mode(bool on) { linear_mode_ = on; }

private:
    std::array<nn::Conv2d, 4> trunk_;
    std::array<nn::Conv2d, 4> proj_;
    bool linear_mode_ = false;
};

/// Learned convex blend of object features into noise features:
/// alpha = sigmoid(conv(concat(z_noise, z_object))), out = alpha*z_object +
/// (1-alpha)*z_noise. The gate convolution starts at exactly zero, so a fresh
/// gate blends with alpha = 1/2 everywhere.
struct BlendGate {
    nn::Conv2d gate;  // 1x1, 2C -> C, zero-initialized
    BlendGate() = default;
    BlendGate(nn::ParamRegistry& reg, const std::string& name, int64_t channels, Rng& rng);
    nn::Var operator()(nn::Graph& g, nn::Var z_noise, nn::Var z_object, ForwardTrace* trace,
                       const std::string& stage) const;
};

}  // namespace envanim
