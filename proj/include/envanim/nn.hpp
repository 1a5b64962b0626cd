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

#include <deque>
#include <string>

#include "envanim/autograd.hpp"
#include "envanim/trace.hpp"

namespace envanim::nn {

using ag::Graph;
using ag::Var;

struct Parameter {
    std::string name;
    Tensor value;
    int id = -1;
};

/// Owns every learnable tensor of a model by name. Layer structs keep stable
/// pointers into it; checkpoints and optimizers iterate it.
class ParamRegistry {
public:
    Parameter* add(const std::string& name, Tensor init);
    std::vector<Parameter*>& all() { return order_; }
    const std::vector<Parameter*>& all() const { return order_; }
    Parameter* find(const std::string& name);
    int64_t total_size() const;
    bool all_finite() const;

private:
    std::deque<Parameter> storage_;
    std::vector<Parameter*> order_;
};

/// Initialization helpers (seeded, reproducible).
Tensor conv_init(Rng& rng, int64_t out_ch, int64_t in_ch, int kh, int kw);
Tensor linear_init(Rng& rng, int64_t in_dim, int64_t out_dim);

struct Linear {
    Parameter* w = nullptr;  // [in, out]
    Parameter* b = nullptr;  // [out]
    Linear() = default;
    Linear(ParamRegistry& reg, const std::string& name, int64_t in, int64_t out, Rng& rng,
           bool zero_init = false);
    Var operator()(Graph& g, Var x) const;  // x: [M, in]
};

struct Conv2d {
    Parameter* w = nullptr;  // [out, in, k, k]
    Parameter* b = nullptr;  // [out]
    int stride = 1, pad = 0;
    Conv2d() = default;
    Conv2d(ParamRegistry& reg, const std::string& name, int64_t in, int64_t out, int k, int stride,
           int pad, Rng& rng, bool zero_init = false);
    Var operator()(Graph& g, Var x) const;
};

struct TemporalConv {
    Parameter* w = nullptr;  // [out, in, 3]
    Parameter* b = nullptr;
    TemporalConv() = default;
    TemporalConv(ParamRegistry& reg, const std::string& name, int64_t in, int64_t out, Rng& rng,
                 bool zero_init = false);
    Var operator()(Graph& g, Var x) const;
};

struct GroupNorm {
    Parameter* gamma = nullptr;
    Parameter* beta = nullptr;
    int groups = 8;
    GroupNorm() = default;
    GroupNorm(ParamRegistry& reg, const std::string& name, int64_t channels, int groups);
    Var operator()(Graph& g, Var x) const;
};

/// Multi-head scaled dot-product attention over rank-3 token tensors
/// [B, T, C]. The output projection is zero-initialized so freshly added
/// attention branches start as no-ops.
struct Attention {
    Linear q, k, v, o;
    int heads = 2;
    Attention() = default;
    Attention(ParamRegistry& reg, const std::string& name, int64_t channels, int heads, Rng& rng);
    /// q_tokens [B,Tq,C], kv_tokens [B,Tk,C]. When `trace` captures attention,
    /// the softmax weights [B*heads, Tq, Tk] are stored under `tag`.
    Var operator()(Graph& g, Var q_tokens, Var kv_tokens, ForwardTrace* trace = nullptr,
                   const std::string& tag = "") const;
};

/// GroupNorm -> SiLU -> conv -> (+ timestep bias) -> GroupNorm -> SiLU -> conv,
/// with an identity or 1x1 skip. Second conv zero-initialized.
struct ResBlock {
    GroupNorm gn1, gn2;
    Conv2d conv1, conv2;
    Linear temb_proj;  // only when built with a time-embedding dim
    Conv2d skip;       // 1x1, only when channel counts differ
    bool has_temb = false, has_skip = false;
    ResBlock() = default;
    ResBlock(ParamRegistry& reg, const std::string& name, int64_t in_ch, int64_t out_ch,
             int64_t temb_dim, int groups, Rng& rng);
    Var operator()(Graph& g, Var x, Var temb) const;  // temb: [1, temb_dim] or undefined
};

/// Temporal self-attention across the frame axis, applied per spatial
/// position with a fixed sinusoidal frame embedding. Residual.
struct TemporalAttention {
    GroupNorm gn;
    Attention attn;
    TemporalAttention() = default;
    TemporalAttention(ParamRegistry& reg, const std::string& name, int64_t channels, int heads,
                      int groups, Rng& rng);
    Var operator()(Graph& g, Var x, ForwardTrace* trace, const std::string& stage) const;
};

/// Spatial cross-attention: queries are the feature-map positions of each
/// frame, keys/values come from a context feature map (reference features or
/// depth features). Residual.
struct SpatialCrossAttention {
    GroupNorm gn;
    Attention attn;
    SpatialCrossAttention() = default;
    SpatialCrossAttention(ParamRegistry& reg, const std::string& name, int64_t channels, int heads,
                          int groups, Rng& rng);
    /// x [N,C,H,W]; ctx [1,C,Hc,Wc] (tiled across frames) or [N,C,Hc,Wc].
    Var operator()(Graph& g, Var x, Var ctx, ForwardTrace* trace, const std::string& kind,
                   const std::string& stage) const;
};

/// Sinusoidal embedding of an integer position, shape [1, dim].
Tensor sinusoidal_embedding(double position, int64_t dim);
/// Rows 0..count-1 of the sinusoidal table, shape [count, dim].
Tensor sinusoidal_table(int64_t count, int64_t dim);

/// [N,C,H,W] -> [N, H*W, C]
Var to_spatial_tokens(Graph& g, Var x);
/// [N, H*W, C] -> [N,C,H,W]
Var from_spatial_tokens(Graph& g, Var tokens, int64_t h, int64_t w);

}  // namespace envanim::nn
