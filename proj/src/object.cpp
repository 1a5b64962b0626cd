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

#include "envanim/object.hpp"

namespace envanim {

ObjectGuider::ObjectGuider(nn::ParamRegistry& reg, const std::string& prefix, int64_t in_channels,
                           int64_t trunk_width, const std::array<int64_t, 4>& consumer_widths,
                           Rng& rng) {
    trunk_[0] = nn::Conv2d(reg, prefix + ".trunk0", in_channels, trunk_width, 3, 1, 1, rng);
    for (int i = 1; i < 4; ++i)
        trunk_[static_cast<size_t>(i)] =
            nn::Conv2d(reg, prefix + ".trunk" + std::to_string(i), trunk_width, trunk_width, 3, 2,
                       1, rng);
    for (int i = 0; i < 4; ++i)
        proj_[static_cast<size_t>(i)] =
            nn::Conv2d(reg, prefix + ".proj" + std::to_string(i), trunk_width,
                       consumer_widths[static_cast<size_t>(i)], 1, 1, 0, rng);
}

std::array<nn::Var, 4> ObjectGuider::operator()(nn::Graph& g, nn::Var object_latents) const {
    std::array<nn::Var, 4> levels;
    nn::Var h = object_latents;
    for (int i = 0; i < 4; ++i) {
        h = trunk_[static_cast<size_t>(i)](g, h);
        if (!linear_mode_) h = ag::silu(g, h);
        levels[static_cast<size_t>(i)] = proj_[static_cast<size_t>(i)](g, h);
    }
    return levels;
}

BlendGate::BlendGate(nn::ParamRegistry& reg, const std::string& name, int64_t channels, Rng& rng)
    : gate(reg, name + ".gate", 2 * channels, channels, 1, 1, 0, rng, /*zero_init=*/true) {}

nn::Var BlendGate::operator()(nn::Graph& g, nn::Var z_noise, nn::Var z_object, ForwardTrace* trace,
                              const std::string& stage) const {
    if (!z_noise.val().same_shape(z_object.val()))
        throw std::invalid_argument("BlendGate: shape mismatch " + z_noise.val().shape_str() +
                                    " vs " + z_object.val().shape_str());
    if (trace) trace->event("blend", stage);
    nn::Var alpha = ag::sigmoid(g, gate(g, ag::concat_ch(g, {z_noise, z_object})));
    nn::Var one = g.constant(Tensor(alpha.val().shape(), 1.0));
    return ag::add(g, ag::mul(g, alpha, z_object),
                   ag::mul(g, ag::sub(g, one, alpha), z_noise));
}

}  // namespace envanim
