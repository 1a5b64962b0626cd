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

#include "envanim/nn.hpp"

#include <cmath>

namespace envanim::nn {

using namespace ag;

Parameter* ParamRegistry::add(const std::string& name, Tensor init) {
    if (find(name)) throw std::logic_error("duplicate parameter name: " + name);
    storage_.push_back(Parameter{name, std::move(init), static_cast<int>(order_.size())});
    order_.push_back(&storage_.back());
    return order_.back();
}

Parameter* ParamRegistry::find(const std::string& name) {
    for (Parameter* p : order_)
        if (p->name == name) return p;
    return nullptr;
}

int64_t ParamRegistry::total_size() const {
    int64_t n = 0;
    for (const Parameter* p : order_) n += p->value.size();
    return n;
}

bool ParamRegistry::all_finite() const {
    for (const Parameter* p : order_)
        if (!p->value.all_finite()) return false;
    return true;
}

Tensor conv_init(Rng& rng, int64_t out_ch, int64_t in_ch, int kh, int kw) {
    Tensor w({out_ch, in_ch, kh, kw});
    double std = std::sqrt(2.0 / static_cast<double>(in_ch * kh * kw));
    for (int64_t i = 0; i < w.size(); ++i) w[i] = rng.normal() * std;
    return w;
}

Tensor linear_init(Rng& rng, int64_t in_dim, int64_t out_dim) {
    Tensor w({in_dim, out_dim});
    double std = std::sqrt(1.0 / static_cast<double>(in_dim));
    for (int64_t i = 0; i < w.size(); ++i) w[i] = rng.normal() * std;
    return w;
}

Linear::Linear(ParamRegistry& reg, const std::string& name, int64_t in, int64_t out, Rng& rng,
               bool zero_init) {
    w = reg.add(name + ".w", zero_init ? Tensor({in, out}) : linear_init(rng, in, out));
    b = reg.add(name + ".b", Tensor({out}));
}

Var Linear::operator()(Graph& g, Var x) const {
    return ag::linear(g, x, g.leaf(w->value, w->id), g.leaf(b->value, b->id));
}

Conv2d::Conv2d(ParamRegistry& reg, const std::string& name, int64_t in, int64_t out, int k,
               int stride_, int pad_, Rng& rng, bool zero_init)
    : stride(stride_), pad(pad_) {
    w = reg.add(name + ".w", zero_init ? Tensor({out, in, k, k}) : conv_init(rng, out, in, k, k));
    b = reg.add(name + ".b", Tensor({out}));
}

Var Conv2d::operator()(Graph& g, Var x) const {
    return ag::conv2d(g, x, g.leaf(w->value, w->id), g.leaf(b->value, b->id), stride, pad);
}

TemporalConv::TemporalConv(ParamRegistry& reg, const std::string& name, int64_t in, int64_t out,
                           Rng& rng, bool zero_init) {
    Tensor init({out, in, 3});
    if (!zero_init) {
        double std = std::sqrt(2.0 / static_cast<double>(in * 3));
        for (int64_t i = 0; i < init.size(); ++i) init[i] = rng.normal() * std;
    }
    w = reg.add(name + ".w", std::move(init));
    b = reg.add(name + ".b", Tensor({out}));
}

Var TemporalConv::operator()(Graph& g, Var x) const {
    return ag::conv_time3(g, x, g.leaf(w->value, w->id), g.leaf(b->value, b->id));
}

GroupNorm::GroupNorm(ParamRegistry& reg, const std::string& name, int64_t channels, int groups_)
    : groups(groups_) {
    gamma = reg.add(name + ".gamma", Tensor({channels}, 1.0));
    beta = reg.add(name + ".beta", Tensor({channels}));
}

Var GroupNorm::operator()(Graph& g, Var x) const {
    return ag::group_norm(g, x, g.leaf(gamma->value, gamma->id), g.leaf(beta->value, beta->id),
                          groups);
}

Attention::Attention(ParamRegistry& reg, const std::string& name, int64_t channels, int heads_,
                     Rng& rng)
    : q(reg, name + ".q", channels, channels, rng),
      k(reg, name + ".k", channels, channels, rng),
      v(reg, name + ".v", channels, channels, rng),
      o(reg, name + ".o", channels, channels, rng, /*zero_init=*/true),
      heads(heads_) {}

namespace {

// [B,T,C] -> [B*heads, T, C/heads]
Var split_heads(Graph& g, Var x, int heads) {
    const int64_t b = x.val().dim(0), t = x.val().dim(1), c = x.val().dim(2);
    Var r = reshape(g, x, {b, t, heads, c / heads});
    r = permute(g, r, {0, 2, 1, 3});
    return reshape(g, r, {b * heads, t, c / heads});
}

Var merge_heads(Graph& g, Var x, int heads) {
    const int64_t bh = x.val().dim(0), t = x.val().dim(1), dh = x.val().dim(2);
    Var r = reshape(g, x, {bh / heads, heads, t, dh});
    r = permute(g, r, {0, 2, 1, 3});
    return reshape(g, r, {bh / heads, t, heads * dh});
}

// Applies a Linear to the last dim of a rank-3 tensor.
Var linear3(Graph& g, const Linear& lin, Var x) {
    const int64_t b = x.val().dim(0), t = x.val().dim(1), c = x.val().dim(2);
    Var flat = reshape(g, x, {b * t, c});
    Var y = lin(g, flat);
    return reshape(g, y, {b, t, y.val().dim(1)});
}

}  // namespace

Var Attention::operator()(Graph& g, Var q_tokens, Var kv_tokens, ForwardTrace* trace,
                          const std::string& tag) const {
    const int64_t c = q_tokens.val().dim(2);
    const int64_t dh = c / heads;
    Var qs = split_heads(g, linear3(g, q, q_tokens), heads);
    Var ks = split_heads(g, linear3(g, k, kv_tokens), heads);
    Var vs = split_heads(g, linear3(g, v, kv_tokens), heads);
    Var logits = bmm(g, qs, transpose_last2(g, ks));
    logits = scale(g, logits, 1.0 / std::sqrt(static_cast<double>(dh)));
    Var weights = softmax_last(g, logits);
    if (trace && trace->capture_attention)
        trace->attention_weights.emplace_back(tag, weights.val());
    Var ctx = bmm(g, weights, vs);
    return linear3(g, o, merge_heads(g, ctx, heads));
}

ResBlock::ResBlock(ParamRegistry& reg, const std::string& name, int64_t in_ch, int64_t out_ch,
                   int64_t temb_dim, int groups, Rng& rng)
    : gn1(reg, name + ".gn1", in_ch, groups),
      gn2(reg, name + ".gn2", out_ch, groups),
      conv1(reg, name + ".conv1", in_ch, out_ch, 3, 1, 1, rng),
      conv2(reg, name + ".conv2", out_ch, out_ch, 3, 1, 1, rng, /*zero_init=*/true) {
    if (temb_dim > 0) {
        temb_proj = Linear(reg, name + ".temb", temb_dim, out_ch, rng);
        has_temb = true;
    }
    if (in_ch != out_ch) {
        skip = Conv2d(reg, name + ".skip", in_ch, out_ch, 1, 1, 0, rng);
        has_skip = true;
    }
}

Var ResBlock::operator()(Graph& g, Var x, Var temb) const {
    Var h = conv1(g, silu(g, gn1(g, x)));
    if (has_temb && temb.defined()) {
        Var bias = temb_proj(g, silu(g, temb));  // [1, out_ch]
        h = add_chan_bias(g, h, reshape(g, bias, {bias.val().dim(1)}));
    }
    h = conv2(g, silu(g, gn2(g, h)));
    Var res = has_skip ? skip(g, x) : x;
    return add(g, h, res);
}

TemporalAttention::TemporalAttention(ParamRegistry& reg, const std::string& name, int64_t channels,
                                     int heads, int groups, Rng& rng)
    : gn(reg, name + ".gn", channels, groups), attn(reg, name + ".attn", channels, heads, rng) {}

Var TemporalAttention::operator()(Graph& g, Var x, ForwardTrace* trace,
                                  const std::string& stage) const {
    const int64_t n = x.val().dim(0), c = x.val().dim(1), h = x.val().dim(2), w = x.val().dim(3);
    if (trace) trace->event("temporal_attn", stage);
    Var xn = gn(g, x);
    // Sequences of length N at each of the H*W spatial positions.
    Var tokens = permute(g, xn, {2, 3, 0, 1});        // [H,W,N,C]
    tokens = reshape(g, tokens, {h * w, n, c});       // [HW,N,C]
    Var emb = g.constant(sinusoidal_table(n, c));     // frame-position embedding
    tokens = add(g, tokens, tile_batch(g, emb, h * w));
    Var out = attn(g, tokens, tokens, trace, "temporal/" + stage);
    out = reshape(g, out, {h, w, n, c});
    out = permute(g, out, {2, 3, 0, 1});
    return add(g, x, out);
}

SpatialCrossAttention::SpatialCrossAttention(ParamRegistry& reg, const std::string& name,
                                             int64_t channels, int heads, int groups, Rng& rng)
    : gn(reg, name + ".gn", channels, groups), attn(reg, name + ".attn", channels, heads, rng) {}

Var SpatialCrossAttention::operator()(Graph& g, Var x, Var ctx, ForwardTrace* trace,
                                      const std::string& kind, const std::string& stage) const {
    const int64_t n = x.val().dim(0), h = x.val().dim(2), w = x.val().dim(3);
    const int64_t hc = ctx.val().dim(2), wc = ctx.val().dim(3), cc = ctx.val().dim(1);
    if (trace) trace->event(kind, stage);
    Var q_tokens = to_spatial_tokens(g, gn(g, x));  // [N,HW,C]
    Var kv;
    if (ctx.val().dim(0) == n) {
        kv = to_spatial_tokens(g, ctx);
    } else if (ctx.val().dim(0) == 1) {
        Var t = reshape(g, to_spatial_tokens(g, ctx), {hc * wc, cc});
        kv = tile_batch(g, t, n);  // [N, HcWc, C]
    } else {
        throw std::invalid_argument("SpatialCrossAttention: context batch must be 1 or N");
    }
    Var out = attn(g, q_tokens, kv, trace, kind + "/" + stage);
    return add(g, x, from_spatial_tokens(g, out, h, w));
}

Tensor sinusoidal_embedding(double position, int64_t dim) {
    Tensor out({1, dim});
    const int64_t half = dim / 2;
    for (int64_t i = 0; i < half; ++i) {
        double freq = std::exp(-std::log(10000.0) * static_cast<double>(i) /
                               static_cast<double>(half > 1 ? half - 1 : 1));
        out[i] = std::sin(position * freq);
        out[half + i] = std::cos(position * freq);
    }
    if (dim % 2) out[dim - 1] = 0.0;
    return out;
}

Tensor sinusoidal_table(int64_t count, int64_t dim) {
    Tensor out({count, dim});
    for (int64_t p = 0; p < count; ++p) {
        Tensor row = sinusoidal_embedding(static_cast<double>(p), dim);
        std::copy_n(row.data(), dim, out.data() + p * dim);
    }
    return out;
}

Var to_spatial_tokens(Graph& g, Var x) {
    const int64_t n = x.val().dim(0), c = x.val().dim(1), h = x.val().dim(2), w = x.val().dim(3);
    Var t = permute(g, x, {0, 2, 3, 1});  // [N,H,W,C]
    return reshape(g, t, {n, h * w, c});
}

Var from_spatial_tokens(Graph& g, Var tokens, int64_t h, int64_t w) {
    const int64_t n = tokens.val().dim(0), c = tokens.val().dim(2);
    Var t = reshape(g, tokens, {n, h, w, c});
    return permute(g, t, {0, 3, 1, 2});
}

}  // namespace envanim::nn
