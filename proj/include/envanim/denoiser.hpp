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
#include <functional>
#include <optional>

#include "envanim/codec.hpp"
#include "envanim/mask.hpp"
#include "envanim/nn.hpp"
#include "envanim/object.hpp"
#include "envanim/pose.hpp"
#include "envanim/scene.hpp"

namespace envanim {

struct DenoiserConfig {
    int64_t image_size = 64;
    int64_t frames = 16;
    int64_t patch = 4;
    int64_t base_width = 64;
    std::array<int64_t, 3> channel_mult{1, 2, 2};
    int heads = 2;
    int norm_groups = 8;
    int64_t time_embed_dim = 128;  // sinusoid width; the MLP hidden dim is twice this
    int64_t guider_width = 32;
    int timesteps = 1000;
    double beta_start = 1e-4, beta_end = 0.02;
    MaskMode mask_mode = MaskMode::ShapeAgnostic;
    ObjectMode object_mode = ObjectMode::Blend;
    PoseMode pose_mode = PoseMode::Modulated;

    int64_t latent_hw() const { return image_size / patch; }
    int64_t latent_ch() const { return 3 * patch * patch; }
    int64_t width(int level) const {
        return base_width * channel_mult[static_cast<size_t>(std::min(level, 2))];
    }
    int64_t mid_width() const { return width(2); }
    /// UNet input channels: noisy latents + environment latents + region
    /// channel, plus object latents in concat mode.
    int64_t input_channels() const {
        return 2 * latent_ch() + 1 + (object_mode == ObjectMode::Concat ? latent_ch() : 0);
    }
    void validate() const;
};

struct DiffusionSchedule {
    int timesteps = 0;
    std::vector<double> betas;
    std::vector<double> alphas_cumprod;

    static DiffusionSchedule linear(int timesteps, double beta_start, double beta_end);
    double alpha_bar(int t) const { return alphas_cumprod.at(static_cast<size_t>(t)); }
};

/// z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) eps
Tensor add_noise(const DiffusionSchedule& sched, const Tensor& z0, const Tensor& eps, int t);

/// Diffusion runs in centered latent coordinates: [0,1] pixel-permutation
/// latents are mapped to [-1,1] and back.
inline Tensor center_latent(Tensor z) {
    for (int64_t i = 0; i < z.size(); ++i) z[i] = 2.0 * z[i] - 1.0;
    return z;
}
inline Tensor uncenter_latent(Tensor z) {
    for (int64_t i = 0; i < z.size(); ++i) z[i] = 0.5 * (z[i] + 1.0);
    return z;
}

/// Mean of each patch x patch cell of the region masks -> [N,1,h,w].
Tensor downsample_region_masks(const std::vector<ByteGrid>& masks, int64_t patch);

/// Everything the denoiser is conditioned on for one clip, as plain tensors.
/// Latent-space entries are centered. `object_latents` is empty when objects
/// are off.
struct Conditioning {
    Tensor env_latents;       // [N,Cz,h,w]
    Tensor region_channel;    // [N,1,h,w]
    Tensor skeleton_maps;     // [N,3,H,W]
    Tensor structured_depth;  // [N,1,H,W]
    Tensor object_latents;    // [N,Cz,h,w] or empty
    Tensor reference_latent;  // [1,Cz,h,w]
};

using NoisePredictor = std::function<Tensor(const Tensor& z_t, int t)>;

/// The conditional latent video denoiser: a three-level 3D UNet plus a
/// bottleneck, reference-feature spatial attention in the mid and up blocks
/// only, spatial blending of object features directly after it, and temporal
/// attention per stage.
class DenoiserModel {
public:
    DenoiserModel(const DenoiserConfig& cfg, uint64_t init_seed);

    const DenoiserConfig& config() const { return cfg_; }
    const DiffusionSchedule& schedule() const { return sched_; }
    nn::ParamRegistry& params() { return reg_; }
    const nn::ParamRegistry& params() const { return reg_; }

    int64_t param_count_with_prefix(const std::string& prefix) const;

    struct CondVars {
        nn::Var input_extra;                // channels appended to z_t at the UNet input
        nn::Var motion;                     // [N,c0,h,w]
        std::array<nn::Var, 4> ref_feats;   // r0, r1, r2, mid
        std::array<nn::Var, 4> obj_pyramid; // defined in blend mode only
    };

    CondVars encode_conditions(nn::Graph& g, const Conditioning& cond,
                               ForwardTrace* trace = nullptr) const;

    nn::Var predict_noise(nn::Graph& g, nn::Var z_t, int t, const CondVars& cond,
                          ForwardTrace* trace = nullptr) const;

    /// Non-recording convenience used by samplers and evaluation.
    Tensor predict_noise(const Tensor& z_t, int t, const Conditioning& cond,
                         ForwardTrace* trace = nullptr) const;

    /// A predictor with the conditioning features computed once up front.
    NoisePredictor make_predictor(const Conditioning& cond) const;

    /// Mean squared error between eps and the prediction at timestep t.
    nn::Var loss(nn::Graph& g, const Tensor& z0, const Conditioning& cond, int t,
                 const Tensor& eps, ForwardTrace* trace = nullptr) const;

private:
    struct DownStage {
        nn::ResBlock res;
        nn::TemporalAttention tattn;
        nn::Conv2d down;  // stride-2 to the next resolution
    };
    struct UpStage {
        nn::Conv2d up;  // after nearest-neighbor upsample
        nn::ResBlock res;
        nn::SpatialCrossAttention ref_attn;
        BlendGate blend;
        nn::TemporalAttention tattn;
    };

    nn::Var time_embedding(nn::Graph& g, int t) const;
    std::array<nn::Var, 4> reference_features(nn::Graph& g, nn::Var ref_latent,
                                              ForwardTrace* trace) const;

    DenoiserConfig cfg_;
    DiffusionSchedule sched_;
    nn::ParamRegistry reg_;

    nn::Linear time_mlp1_, time_mlp2_;
    nn::Conv2d conv_in_;
    std::array<DownStage, 3> down_;
    nn::ResBlock mid_res_a_, mid_res_b_;
    nn::SpatialCrossAttention mid_ref_attn_;
    BlendGate mid_blend_;
    nn::TemporalAttention mid_tattn_;
    std::array<UpStage, 3> up_;  // up_[2] at r2 first, up_[0] at r0 last
    nn::GroupNorm out_gn_;
    nn::Conv2d out_conv_;

    // Reference encoder: a 2D clone of the down path.
    nn::Conv2d ref_conv_in_;
    std::array<nn::ResBlock, 3> ref_res_;
    std::array<nn::Conv2d, 3> ref_down_;
    nn::ResBlock ref_mid_;

    MotionEncoder motion_;
    ObjectGuider guider_;
};

/// Deterministic DDIM trajectory from a given start latent over `steps`
/// evenly spaced timesteps. The intermediate data prediction is clamped to
/// the valid centered-latent range.
Tensor ddim_denoise(const DiffusionSchedule& sched, const NoisePredictor& predict, Tensor z_start,
                    int steps, double clamp_lo = -1.0, double clamp_hi = 1.0);

/// Samples the start latent from a seeded standard normal, then denoises.
Tensor ddim_sample(const DiffusionSchedule& sched, const NoisePredictor& predict,
                   const std::vector<int64_t>& shape, int steps, Rng& rng, double clamp_lo = -1.0,
                   double clamp_hi = 1.0);

/// Plain-value objective used by tests with predictor hooks.
double loss_with_predictor(const DiffusionSchedule& sched, const Tensor& z0, const Tensor& eps,
                           int t, const NoisePredictor& predict);

}  // namespace envanim
