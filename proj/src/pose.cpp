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

#include "envanim/pose.hpp"

#include <algorithm>
#include <cmath>

namespace envanim {

namespace {

// Fixed per-bone colors, in bone_topology() order.
const double kBoneColors[7][3] = {
    {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 1.0, 0.0},
    {1.0, 0.0, 1.0}, {0.0, 1.0, 1.0}, {1.0, 0.5, 0.0},
};

constexpr double kHalfWidth = 1.0;  // band of total width 2

}  // namespace

Tensor rasterize_skeleton(const Tensor& joints, int64_t height, int64_t width) {
    if (joints.rank() != 3 || joints.dim(1) != kJointCount || joints.dim(2) != 3)
        throw std::invalid_argument("rasterize_skeleton: joints must be [N,J,3]");
    const int64_t n = joints.dim(0);
    Tensor maps({n, 3, height, width});
    const auto& bones = bone_topology();
    for (int64_t f = 0; f < n; ++f) {
        for (size_t b = 0; b < bones.size(); ++b) {
            auto [ja, jb] = bones[b];
            double ax = joints.at(f, ja, 0), ay = joints.at(f, ja, 1), ad = joints.at(f, ja, 2);
            double bx = joints.at(f, jb, 0), by = joints.at(f, jb, 1), bd = joints.at(f, jb, 2);
            if (joint_occluded(ax, ay, ad) || joint_occluded(bx, by, bd)) continue;
            ax = std::clamp(ax, 0.0, static_cast<double>(width - 1));
            bx = std::clamp(bx, 0.0, static_cast<double>(width - 1));
            ay = std::clamp(ay, 0.0, static_cast<double>(height - 1));
            by = std::clamp(by, 0.0, static_cast<double>(height - 1));
            const double dx = bx - ax, dy = by - ay;
            const double len2 = dx * dx + dy * dy;
            int64_t r0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(std::min(ay, by) - kHalfWidth - 1)));
            int64_t r1 = std::min<int64_t>(height, static_cast<int64_t>(std::ceil(std::max(ay, by) + kHalfWidth + 1)));
            int64_t c0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(std::min(ax, bx) - kHalfWidth - 1)));
            int64_t c1 = std::min<int64_t>(width, static_cast<int64_t>(std::ceil(std::max(ax, bx) + kHalfWidth + 1)));
            for (int64_t r = r0; r < r1; ++r)
                for (int64_t c = c0; c < c1; ++c) {
                    const double px = static_cast<double>(c) + 0.5, py = static_cast<double>(r) + 0.5;
                    double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
                    if (t < 0.0 || t > 1.0) continue;  // band strictly between the joints
                    const double qx = ax + t * dx, qy = ay + t * dy;
                    const double dist = std::hypot(px - qx, py - qy);
                    const double intensity = std::clamp(kHalfWidth - dist, 0.0, 1.0);
                    if (intensity <= 0.0) continue;
                    for (int ch = 0; ch < 3; ++ch) {
                        double& dst = maps.at(f, ch, r, c);
                        dst = std::max(dst, kBoneColors[b][ch] * intensity);
                    }
                }
        }
    }
    return maps;
}

Tensor structure_depth(const Tensor& skeleton_maps, const Tensor& depth_maps) {
    if (skeleton_maps.rank() != 4 || skeleton_maps.dim(1) != 3)
        throw std::invalid_argument("structure_depth: skeleton maps must be [N,3,H,W]");
    const int64_t n = skeleton_maps.dim(0), h = skeleton_maps.dim(2), w = skeleton_maps.dim(3);
    if (depth_maps.rank() != 3 || depth_maps.dim(0) != n || depth_maps.dim(1) != h ||
        depth_maps.dim(2) != w)
        throw std::invalid_argument("structure_depth: depth maps must be [N,H,W] matching skeleton");
    Tensor out({n, 1, h, w});
    for (int64_t f = 0; f < n; ++f)
        for (int64_t i = 0; i < h * w; ++i) {
            const double* sk = skeleton_maps.data() + f * 3 * h * w;
            bool support = sk[i] != 0.0 || sk[h * w + i] != 0.0 || sk[2 * h * w + i] != 0.0;
            out[f * h * w + i] = support ? depth_maps[f * h * w + i] : 0.0;
        }
    return out;
}

MotionSequence build_motion_sequence(const VideoClip& clip) {
    MotionSequence seq;
    seq.skeleton_maps = rasterize_skeleton(clip.skeleton, clip.height(), clip.width());
    seq.structured_depth = structure_depth(seq.skeleton_maps, clip.depth);
    return seq;
}

MotionEncoder::MotionEncoder(nn::ParamRegistry& reg, const std::string& prefix,
                             int64_t out_channels, int64_t patch, int heads, int groups,
                             PoseMode mode, Rng& rng)
    : mode_(mode) {
    int stages = 0;
    for (int64_t p = patch; p > 1; p /= 2) {
        if (p % 2 != 0) throw std::invalid_argument("MotionEncoder: patch must be a power of two");
        ++stages;
    }
    auto build = [&](const std::string& name, int64_t in_ch) {
        Stack s;
        int64_t cur = in_ch;
        for (int i = 0; i < stages; ++i) {
            int64_t out = std::max<int64_t>(4, out_channels >> (stages - 1 - i));
            s.convs.emplace_back(reg, name + ".down" + std::to_string(i), cur, out, 3, 2, 1, rng);
            cur = out;
        }
        s.convs.emplace_back(reg, name + ".refine", cur, out_channels, 3, 1, 1, rng);
        return s;
    };
    skeleton_stack_ = build(prefix + ".skel", 3);
    if (mode_ == PoseMode::Modulated) {
        depth_stack_ = build(prefix + ".depth", 1);
        cross_ = nn::SpatialCrossAttention(reg, prefix + ".cross", out_channels, heads, groups, rng);
    }
    temporal_ = nn::TemporalConv(reg, prefix + ".temporal", out_channels, out_channels, rng);
    out_proj_ = nn::Conv2d(reg, prefix + ".out", out_channels, out_channels, 1, 1, 0, rng,
                           /*zero_init=*/true);
}

nn::Var MotionEncoder::run_stack(nn::Graph& g, const Stack& s, nn::Var x) const {
    nn::Var h = x;
    for (size_t i = 0; i < s.convs.size(); ++i) {
        h = s.convs[i](g, h);
        if (i + 1 < s.convs.size()) h = ag::silu(g, h);
    }
    return h;
}

nn::Var MotionEncoder::operator()(nn::Graph& g, nn::Var skeleton_maps, nn::Var structured_depth,
                                  ForwardTrace* trace) const {
    nn::Var skel = run_stack(g, skeleton_stack_, skeleton_maps);
    if (mode_ == PoseMode::Modulated) {
        nn::Var dep = run_stack(g, depth_stack_, structured_depth);
        skel = cross_(g, skel, dep, trace, "pose_cross_attn", "motion");
    }
    nn::Var h = temporal_(g, skel);
    if (trace) trace->event("temporal_conv", "motion");
    return out_proj_(g, h);
}

}  // namespace envanim
