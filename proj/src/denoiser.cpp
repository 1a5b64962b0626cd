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

#include "envanim/denoiser.hpp"

#include <algorithm>
#include <cmath>

namespace envanim {

using ag::Graph;
using ag::Var;

void DenoiserConfig::validate() const {
    if (image_size % patch != 0)
        throw std::invalid_argument("config: image_size must be divisible by patch");
    if (latent_hw() < 8)
        throw std::invalid_argument("config: latent grid must be at least 8x8 (image_size >= 8*patch)");
    if (frames < 1) throw std::invalid_argument("config: frames must be >= 1");
    for (int level = 0; level < 3; ++level) {
        if (width(level) % norm_groups != 0)
            throw std::invalid_argument("config: stage width not divisible by norm_groups");
        if (width(level) % heads != 0)
            throw std::invalid_argument("config: stage width not divisible by heads");
    }
    if (timesteps < 2 || beta_start <= 0 || beta_end >= 1 || beta_start > beta_end)
        throw std::invalid_argument("config: bad diffusion schedule parameters");
    if (time_embed_dim < 2 || time_embed_dim % 2 != 0)
        throw std::invalid_argument("config: time_embed_dim must be even and >= 2");
}

DiffusionSchedule DiffusionSchedule::linear(int timesteps, double beta_start, double beta_end) {
    DiffusionSchedule s;
    s.timesteps = timesteps;
    s.betas.resize(static_cast<size_t>(timesteps));
    s.alphas_cumprod.resize(static_cast<size_t>(timesteps));
    double prod = 1.0;
    for (int t = 0; t < timesteps; ++t) {
        double beta = timesteps > 1
                          ? beta_start + (beta_end - beta_start) * static_cast<double>(t) /
                                             static_cast<double>(timesteps - 1)
                          : beta_start;
        s.betas[static_cast<size_t>(t)] = beta;
        prod *= (1.0 - beta);
        s.alphas_cumprod[static_cast<size_t>(t)] = prod;
    }
    return s;
}

Tensor add_noise(const DiffusionSchedule& sched, const Tensor& z0, const Tensor& eps, int t) {
    if (t < 0 || t >= sched.timesteps) throw std::invalid_argument("add_noise: t out of range");
    if (!z0.same_shape(eps)) throw std::invalid_argument("add_noise: eps shape mismatch");
    const double ab = sched.alpha_bar(t);
    const double a = std::sqrt(ab), b = std::sqrt(1.0 - ab);
    Tensor out = z0;
    for (int64_t i = 0; i < out.size(); ++i) out[i] = a * out[i] + b * eps[i];
    return out;
}

Tensor downsample_region_masks(const std::vector<ByteGrid>& masks, int64_t patch) {
    if (masks.empty()) throw std::invalid_argument("downsample_region_masks: no masks");
    const int64_t n = static_cast<int64_t>(masks.size());
    const int64_t h = masks[0].h / patch, w = masks[0].w / patch;
    Tensor out({n, 1, h, w});
    const double inv = 1.0 / static_cast<double>(patch * patch);
    for (int64_t f = 0; f < n; ++f)
        for (int64_t r = 0; r < h; ++r)
            for (int64_t c = 0; c < w; ++c) {
                double s = 0.0;
                for (int64_t dy = 0; dy < patch; ++dy)
                    for (int64_t dx = 0; dx < patch; ++dx)
                        s += masks[static_cast<size_t>(f)].at(r * patch + dy, c * patch + dx);
                out.at(f, 0, r, c) = s * inv;
            }
    return out;
}

DenoiserModel::DenoiserModel(const DenoiserConfig& cfg, uint64_t init_seed) : cfg_(cfg) {
    cfg_.validate();
    sched_ = DiffusionSchedule::linear(cfg.timesteps, cfg.beta_start, cfg.beta_end);
    Rng rng = Rng::stream(init_seed, /*purpose=*/0x1217);

    const int64_t c0 = cfg_.width(0), c1 = cfg_.width(1), c2 = cfg_.width(2);
    const int64_t cm = cfg_.mid_width();
    const int64_t tdim = cfg_.time_embed_dim, tmlp = 2 * cfg_.time_embed_dim;
    const int g = cfg_.norm_groups;

    time_mlp1_ = nn::Linear(reg_, "unet.time.mlp1", tdim, tmlp, rng);
    time_mlp2_ = nn::Linear(reg_, "unet.time.mlp2", tmlp, tmlp, rng);
    conv_in_ = nn::Conv2d(reg_, "unet.conv_in", cfg_.input_channels(), c0, 3, 1, 1, rng);

    const int64_t widths[4] = {c0, c1, c2, cm};
    for (int i = 0; i < 3; ++i) {
        auto& d = down_[static_cast<size_t>(i)];
        std::string p = "unet.down" + std::to_string(i);
        d.res = nn::ResBlock(reg_, p + ".res", widths[i], widths[i], tmlp, g, rng);
        d.tattn = nn::TemporalAttention(reg_, p + ".tattn", widths[i], cfg_.heads, g, rng);
        d.down = nn::Conv2d(reg_, p + ".down", widths[i], widths[i + 1], 3, 2, 1, rng);
    }
    mid_res_a_ = nn::ResBlock(reg_, "unet.mid.res_a", cm, cm, tmlp, g, rng);
    mid_ref_attn_ = nn::SpatialCrossAttention(reg_, "unet.mid.ref_attn", cm, cfg_.heads, g, rng);
    if (cfg_.object_mode == ObjectMode::Blend)
        mid_blend_ = BlendGate(reg_, "unet.mid.blend", cm, rng);
    mid_tattn_ = nn::TemporalAttention(reg_, "unet.mid.tattn", cm, cfg_.heads, g, rng);
    mid_res_b_ = nn::ResBlock(reg_, "unet.mid.res_b", cm, cm, tmlp, g, rng);

    const int64_t up_in[3] = {c1, c2, cm};  // channels arriving from below, per stage index
    for (int i = 2; i >= 0; --i) {
        auto& u = up_[static_cast<size_t>(i)];
        std::string p = "unet.up" + std::to_string(i);
        u.up = nn::Conv2d(reg_, p + ".up", up_in[i], widths[i], 3, 1, 1, rng);
        u.res = nn::ResBlock(reg_, p + ".res", 2 * widths[i], widths[i], tmlp, g, rng);
        u.ref_attn = nn::SpatialCrossAttention(reg_, p + ".ref_attn", widths[i], cfg_.heads, g, rng);
        if (cfg_.object_mode == ObjectMode::Blend)
            u.blend = BlendGate(reg_, p + ".blend", widths[i], rng);
        u.tattn = nn::TemporalAttention(reg_, p + ".tattn", widths[i], cfg_.heads, g, rng);
    }
    out_gn_ = nn::GroupNorm(reg_, "unet.out.gn", c0, g);
    out_conv_ = nn::Conv2d(reg_, "unet.out.conv", c0, cfg_.latent_ch(), 3, 1, 1, rng,
                           /*zero_init=*/true);

    ref_conv_in_ = nn::Conv2d(reg_, "ref.conv_in", cfg_.latent_ch(), c0, 3, 1, 1, rng);
    for (int i = 0; i < 3; ++i) {
        std::string p = "ref.down" + std::to_string(i);
        ref_res_[static_cast<size_t>(i)] = nn::ResBlock(reg_, p + ".res", widths[i], widths[i], 0, g, rng);
        ref_down_[static_cast<size_t>(i)] =
            nn::Conv2d(reg_, p + ".down", widths[i], widths[i + 1], 3, 2, 1, rng);
    }
    ref_mid_ = nn::ResBlock(reg_, "ref.mid.res", cm, cm, 0, g, rng);

    motion_ = MotionEncoder(reg_, "motion", c0, cfg_.patch, cfg_.heads, g, cfg_.pose_mode, rng);
    if (cfg_.object_mode == ObjectMode::Blend)
        guider_ = ObjectGuider(reg_, "guider", cfg_.latent_ch(), cfg_.guider_width,
                               {c0, c1, c2, cm}, rng);
}

int64_t DenoiserModel::param_count_with_prefix(const std::string& prefix) const {
    int64_t n = 0;
    for (const nn::Parameter* p : reg_.all())
        if (p->name.rfind(prefix, 0) == 0) n += p->value.size();
    return n;
}

Var DenoiserModel::time_embedding(Graph& g, int t) const {
    Var emb = g.constant(nn::sinusoidal_embedding(static_cast<double>(t), cfg_.time_embed_dim));
    return time_mlp2_(g, ag::silu(g, time_mlp1_(g, emb)));
}

std::array<Var, 4> DenoiserModel::reference_features(Graph& g, Var ref_latent,
                                                     ForwardTrace* trace) const {
    std::array<Var, 4> feats;
    Var h = ref_conv_in_(g, ref_latent);
    Var none;
    for (int i = 0; i < 3; ++i) {
        h = ref_res_[static_cast<size_t>(i)](g, h, none);
        feats[static_cast<size_t>(i)] = h;
        h = ref_down_[static_cast<size_t>(i)](g, h);
    }
    feats[3] = ref_mid_(g, h, none);
    if (trace) trace->event("ref_encode", "reference");
    return feats;
}

DenoiserModel::CondVars DenoiserModel::encode_conditions(Graph& g, const Conditioning& cond,
                                                         ForwardTrace* trace) const {
    CondVars out;
    std::vector<Var> extra = {g.constant(cond.env_latents), g.constant(cond.region_channel)};
    if (cfg_.object_mode == ObjectMode::Concat) {
        if (cond.object_latents.empty())
            throw std::invalid_argument("encode_conditions: concat mode requires object latents");
        extra.push_back(g.constant(cond.object_latents));
    }
    out.input_extra = ag::concat_ch(g, extra);
    out.motion = motion_(g, g.constant(cond.skeleton_maps), g.constant(cond.structured_depth), trace);
    out.ref_feats = reference_features(g, g.constant(cond.reference_latent), trace);
    if (cfg_.object_mode == ObjectMode::Blend) {
        if (cond.object_latents.empty())
            throw std::invalid_argument("encode_conditions: blend mode requires object latents");
        out.obj_pyramid = guider_(g, g.constant(cond.object_latents));
    }
    return out;
}

Var DenoiserModel::predict_noise(Graph& g, Var z_t, int t, const CondVars& cond,
                                 ForwardTrace* trace) const {
    if (z_t.val().rank() != 4 || z_t.val().dim(1) != cfg_.latent_ch() ||
        z_t.val().dim(2) != cfg_.latent_hw() || z_t.val().dim(3) != cfg_.latent_hw())
        throw std::invalid_argument("predict_noise: bad latent shape " + z_t.val().shape_str());
    if (!z_t.val().all_finite()) throw std::runtime_error("predict_noise: non-finite latents");

    Var temb = time_embedding(g, t);
    Var x = ag::concat_ch(g, {z_t, cond.input_extra});
    x = conv_in_(g, x);
    x = ag::add(g, x, cond.motion);  // motion enters right after the first convolution

    std::array<Var, 3> skips;
    for (int i = 0; i < 3; ++i) {
        const auto& d = down_[static_cast<size_t>(i)];
        std::string stage = "down" + std::to_string(i);
        if (trace) trace->event("res", stage);
        x = d.res(g, x, temb);
        x = d.tattn(g, x, trace, stage);
        skips[static_cast<size_t>(i)] = x;
        x = d.down(g, x);
    }

    if (trace) trace->event("res", "mid");
    x = mid_res_a_(g, x, temb);
    x = mid_ref_attn_(g, x, cond.ref_feats[3], trace, "ref_attn", "mid");
    if (cfg_.object_mode == ObjectMode::Blend) x = mid_blend_(g, x, cond.obj_pyramid[3], trace, "mid");
    x = mid_tattn_(g, x, trace, "mid");
    if (trace) trace->event("res", "mid");
    x = mid_res_b_(g, x, temb);

    for (int i = 2; i >= 0; --i) {
        const auto& u = up_[static_cast<size_t>(i)];
        std::string stage = "up" + std::to_string(i);
        x = u.up(g, ag::upsample_nearest2(g, x));
        x = ag::concat_ch(g, {x, skips[static_cast<size_t>(i)]});
        if (trace) trace->event("res", stage);
        x = u.res(g, x, temb);
        x = u.ref_attn(g, x, cond.ref_feats[static_cast<size_t>(i)], trace, "ref_attn", stage);
        if (cfg_.object_mode == ObjectMode::Blend)
            x = u.blend(g, x, cond.obj_pyramid[static_cast<size_t>(i)], trace, stage);
        x = u.tattn(g, x, trace, stage);
    }
    Var out = out_conv_(g, ag::silu(g, out_gn_(g, x)));
    if (!out.val().all_finite()) throw std::runtime_error("predict_noise: non-finite output");
    return out;
}

Tensor DenoiserModel::predict_noise(const Tensor& z_t, int t, const Conditioning& cond,
                                    ForwardTrace* trace) const {
    Graph g(/*recording=*/false);
    CondVars cv = encode_conditions(g, cond, trace);
    return predict_noise(g, g.constant(z_t), t, cv, trace).val();
}

NoisePredictor DenoiserModel::make_predictor(const Conditioning& cond) const {
    // Conditioning features do not depend on (z_t, t); hold one non-recording
    // graph with them and run only the UNet pass per step.
    auto g = std::make_shared<Graph>(false);
    auto cv = std::make_shared<CondVars>(encode_conditions(*g, cond));
    return [this, g, cv](const Tensor& z_t, int t) {
        Graph step(false);
        CondVars local;
        local.input_extra = step.constant(cv->input_extra.val());
        local.motion = step.constant(cv->motion.val());
        for (int i = 0; i < 4; ++i) {
            local.ref_feats[static_cast<size_t>(i)] =
                step.constant(cv->ref_feats[static_cast<size_t>(i)].val());
            if (config().object_mode == ObjectMode::Blend)
                local.obj_pyramid[static_cast<size_t>(i)] =
                    step.constant(cv->obj_pyramid[static_cast<size_t>(i)].val());
        }
        return predict_noise(step, step.constant(z_t), t, local).val();
    };
}

Var DenoiserModel::loss(Graph& g, const Tensor& z0, const Conditioning& cond, int t,
                        const Tensor& eps, ForwardTrace* trace) const {
    Tensor z_t = add_noise(sched_, z0, eps, t);
    CondVars cv = encode_conditions(g, cond, trace);
    Var pred = predict_noise(g, g.constant(z_t), t, cv, trace);
    return ag::mse(g, pred, g.constant(eps));
}

Tensor ddim_denoise(const DiffusionSchedule& sched, const NoisePredictor& predict, Tensor z_start,
                    int steps, double clamp_lo, double clamp_hi) {
    if (steps < 1 || steps > sched.timesteps)
        throw std::invalid_argument("ddim_denoise: steps out of range");
    std::vector<int> ts(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i)
        ts[static_cast<size_t>(i)] =
            steps == 1 ? sched.timesteps - 1
                       : static_cast<int>(std::llround(static_cast<double>(i) *
                                                       static_cast<double>(sched.timesteps - 1) /
                                                       static_cast<double>(steps - 1)));
    Tensor z = std::move(z_start);
    for (int i = steps - 1; i >= 0; --i) {
        const int t = ts[static_cast<size_t>(i)];
        Tensor eps_hat = predict(z, t);
        const double ab = sched.alpha_bar(t);
        const double sa = std::sqrt(ab), sb = std::sqrt(1.0 - ab);
        Tensor z0_hat(z.shape());
        for (int64_t k = 0; k < z.size(); ++k)
            z0_hat[k] = std::clamp((z[k] - sb * eps_hat[k]) / sa, clamp_lo, clamp_hi);
        if (i == 0) {
            z = std::move(z0_hat);
        } else {
            const double ab_prev = sched.alpha_bar(ts[static_cast<size_t>(i) - 1]);
            const double pa = std::sqrt(ab_prev), pb = std::sqrt(1.0 - ab_prev);
            for (int64_t k = 0; k < z.size(); ++k) z[k] = pa * z0_hat[k] + pb * eps_hat[k];
        }
    }
    return z;
}

Tensor ddim_sample(const DiffusionSchedule& sched, const NoisePredictor& predict,
                   const std::vector<int64_t>& shape, int steps, Rng& rng, double clamp_lo,
                   double clamp_hi) {
    Tensor z(shape);
    rng.fill_normal(z);
    return ddim_denoise(sched, predict, std::move(z), steps, clamp_lo, clamp_hi);
}

double loss_with_predictor(const DiffusionSchedule& sched, const Tensor& z0, const Tensor& eps,
                           int t, const NoisePredictor& predict) {
    Tensor z_t = add_noise(sched, z0, eps, t);
    Tensor pred = predict(z_t, t);
    double mse = 0.0;
    for (int64_t i = 0; i < eps.size(); ++i) {
        double d = eps[i] - pred[i];
        mse += d * d;
    }
    return mse / static_cast<double>(eps.size());
}

}  // namespace envanim
