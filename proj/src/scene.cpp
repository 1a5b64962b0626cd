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

#include "envanim/scene.hpp"

#include <algorithm>
#include <cmath>

namespace envanim {

namespace {

ByteGrid region_for_frame(const ByteGrid& basis, const BlockCoefficients& coeffs, MaskMode mode,
                          bool* empty) {
    *empty = basis.count() == 0;
    switch (mode) {
        case MaskMode::ShapeAgnostic: {
            FormulatedMask fm = formulated_region(basis, coeffs);
            return fm.grid;
        }
        case MaskMode::Precise:
            return basis;
        case MaskMode::Bbox:
            return bbox_region(basis);
    }
    return basis;
}

}  // namespace

Decomposition decompose_clip(const VideoClip& clip, const std::vector<BlockCoefficients>& coeffs,
                             const std::array<double, 3>& fill, MaskMode mode) {
    const int64_t n = clip.n(), h = clip.height(), w = clip.width();
    if (static_cast<int64_t>(coeffs.size()) != n)
        throw std::invalid_argument("decompose_clip: one coefficient pair per frame required");
    Decomposition out;
    out.character.frames = Tensor({n, 3, h, w});
    out.environment.frames = Tensor({n, 3, h, w});
    out.object.frames = Tensor({n, 3, h, w});
    out.environment.empty_frames.assign(static_cast<size_t>(n), 0);
    const auto& basis = clip.generation_basis();
    for (int64_t f = 0; f < n; ++f) {
        bool empty = false;
        ByteGrid region = region_for_frame(basis[static_cast<size_t>(f)], coeffs[static_cast<size_t>(f)],
                                           mode, &empty);
        out.environment.empty_frames[static_cast<size_t>(f)] = empty ? 1 : 0;
        const ByteGrid& cm = clip.character_masks[static_cast<size_t>(f)];
        const ByteGrid& om = clip.object_masks[static_cast<size_t>(f)];
        for (int64_t c = 0; c < 3; ++c) {
            const double* src = clip.frames.data() + (f * 3 + c) * h * w;
            double* env = out.environment.frames.data() + (f * 3 + c) * h * w;
            double* chr = out.character.frames.data() + (f * 3 + c) * h * w;
            double* obj = out.object.frames.data() + (f * 3 + c) * h * w;
            for (int64_t i = 0; i < h * w; ++i) {
                env[i] = region.v[static_cast<size_t>(i)] ? fill[static_cast<size_t>(c)] : src[i];
                chr[i] = cm.v[static_cast<size_t>(i)] ? src[i] : fill[static_cast<size_t>(c)];
                obj[i] = om.v[static_cast<size_t>(i)] ? src[i] : fill[static_cast<size_t>(c)];
            }
        }
        out.environment.region_masks.push_back(std::move(region));
        out.character.masks.push_back(cm);
        out.object.masks.push_back(om);
    }
    return out;
}

Decomposition decompose_clip(const VideoClip& clip, const BlockCoefficients& coeffs,
                             const std::array<double, 3>& fill, MaskMode mode) {
    return decompose_clip(clip, std::vector<BlockCoefficients>(static_cast<size_t>(clip.n()), coeffs),
                          fill, mode);
}

ReferenceImage composite_reference(const VideoClip& clip, int64_t frame_index,
                                   const Tensor& background) {
    const int64_t h = clip.height(), w = clip.width();
    if (frame_index < 0 || frame_index >= clip.n())
        throw std::invalid_argument("composite_reference: frame index out of range");
    if (background.rank() != 3 || background.dim(0) != 3 || background.dim(1) != h ||
        background.dim(2) != w)
        throw std::invalid_argument("composite_reference: background must be [3,H,W]");
    const ByteGrid& cm = clip.character_masks[static_cast<size_t>(frame_index)];
    Box bbox = tight_bbox(cm);
    if (bbox.height == 0)
        throw std::invalid_argument("composite_reference: empty character mask, resample the frame");
    // Integer shift that moves the bbox center onto the image center.
    int64_t dr = h / 2 - (bbox.top + bbox.height / 2);
    int64_t dc = w / 2 - (bbox.left + bbox.width / 2);
    ReferenceImage out;
    out.provenance = frame_index;
    out.image = background;
    for (int64_t r = 0; r < h; ++r)
        for (int64_t c = 0; c < w; ++c) {
            if (!cm.at(r, c)) continue;
            int64_t tr = r + dr, tc = c + dc;
            if (tr < 0 || tr >= h || tc < 0 || tc >= w) continue;
            for (int64_t ch = 0; ch < 3; ++ch)
                out.image.at(ch, tr, tc) = clip.frames.at(frame_index, ch, r, c);
        }
    return out;
}

ReferenceImage build_reference_image(const VideoClip& clip, int64_t frame_index, Rng& rng) {
    Tensor bg({3, clip.height(), clip.width()});
    for (int64_t c = 0; c < 3; ++c) {
        double v = rng.uniform(0.05, 0.95);
        double* p = bg.data() + c * clip.height() * clip.width();
        std::fill(p, p + clip.height() * clip.width(), v);
    }
    return composite_reference(clip, frame_index, bg);
}

std::optional<std::pair<double, double>> foot_anchor(const VideoClip& clip) {
    int64_t top = clip.height(), left = clip.width(), bottom = -1, right = -1;
    for (const auto& m : clip.character_masks) {
        Box b = tight_bbox(m);
        if (b.height == 0) continue;
        top = std::min(top, b.top);
        left = std::min(left, b.left);
        bottom = std::max(bottom, b.bottom());
        right = std::max(right, b.right());
    }
    if (bottom < 0) return std::nullopt;
    return std::make_pair(static_cast<double>(bottom), (static_cast<double>(left + right)) / 2.0);
}

namespace {

double bilinear(const double* plane, int64_t h, int64_t w, double y, double x) {
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    int64_t y0 = static_cast<int64_t>(std::floor(y)), x0 = static_cast<int64_t>(std::floor(x));
    int64_t y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
    double fy = y - static_cast<double>(y0), fx = x - static_cast<double>(x0);
    double a = plane[y0 * w + x0] * (1 - fx) + plane[y0 * w + x1] * fx;
    double b = plane[y1 * w + x0] * (1 - fx) + plane[y1 * w + x1] * fx;
    return a * (1 - fy) + b * fy;
}

}  // namespace

VideoClip random_scale_augment(const VideoClip& clip, double scale,
                               std::pair<double, double> anchor) {
    if (scale < 0.1 || scale > 10.0)
        throw std::invalid_argument("random_scale_augment: unreasonable scale");
    if (scale == 1.0) {
        VideoClip out = clip;
        out.region_basis = clip.generation_basis();
        return out;
    }
    const int64_t n = clip.n(), h = clip.height(), w = clip.width();
    const double ar = anchor.first, ac = anchor.second;
    VideoClip out = clip;
    out.region_basis.clear();
    bool clipped = false;
    for (int64_t f = 0; f < n; ++f) {
        const ByteGrid& cm = clip.character_masks[static_cast<size_t>(f)];
        const ByteGrid& om = clip.object_masks[static_cast<size_t>(f)];
        ByteGrid moved = mask_union(cm, om);
        ByteGrid new_cm(h, w), new_om(h, w);
        // Walk target pixels; source position is the inverse map about the anchor.
        for (int64_t r = 0; r < h; ++r)
            for (int64_t c = 0; c < w; ++c) {
                double sy = ar + (static_cast<double>(r) - ar) / scale;
                double sx = ac + (static_cast<double>(c) - ac) / scale;
                int64_t nr = static_cast<int64_t>(std::llround(sy));
                int64_t nc = static_cast<int64_t>(std::llround(sx));
                if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                bool is_char = cm.at(nr, nc) != 0, is_obj = om.at(nr, nc) != 0;
                if (!is_char && !is_obj) continue;
                new_cm.at(r, c) = is_char ? 1 : 0;
                new_om.at(r, c) = is_obj ? 1 : 0;
                for (int64_t ch = 0; ch < 3; ++ch)
                    out.frames.at(f, ch, r, c) =
                        bilinear(clip.frames.data() + (f * 3 + ch) * h * w, h, w, sy, sx);
                out.depth.at(f, r, c) = clip.depth.data()[f * h * w + nr * w + nc];
            }
        // Scaled content reaching the frame border means it was cut off.
        if (scale > 1.0) {
            Box b = tight_bbox(moved);
            if (b.height > 0) {
                double top = ar + (static_cast<double>(b.top) - ar) * scale;
                double bot = ar + (static_cast<double>(b.bottom()) - ar) * scale;
                double lef = ac + (static_cast<double>(b.left) - ac) * scale;
                double rig = ac + (static_cast<double>(b.right()) - ac) * scale;
                if (top < 0 || lef < 0 || bot > static_cast<double>(h) || rig > static_cast<double>(w))
                    clipped = true;
            }
        }
        out.region_basis.push_back(
            mask_union(clip.generation_basis()[static_cast<size_t>(f)], new_cm));
        out.character_masks[static_cast<size_t>(f)] = std::move(new_cm);
        out.object_masks[static_cast<size_t>(f)] = std::move(new_om);
        for (int64_t j = 0; j < kJointCount; ++j) {
            double x = clip.skeleton.at(f, j, 0), y = clip.skeleton.at(f, j, 1);
            if (joint_occluded(x, y, clip.skeleton.at(f, j, 2))) continue;
            out.skeleton.at(f, j, 0) = std::clamp(ac + (x - ac) * scale, 0.0, static_cast<double>(w - 1));
            out.skeleton.at(f, j, 1) = std::clamp(ar + (y - ar) * scale, 0.0, static_cast<double>(h - 1));
        }
    }
    out.clipped = clipped;
    return out;
}

BlockCoefficients sample_clip_coefficients(const VideoClip& clip, Rng& rng) {
    int64_t top = clip.height(), left = clip.width(), bottom = -1, right = -1;
    for (const auto& m : clip.generation_basis()) {
        Box b = tight_bbox(m);
        if (b.height == 0) continue;
        top = std::min(top, b.top);
        left = std::min(left, b.left);
        bottom = std::max(bottom, b.bottom());
        right = std::max(right, b.right());
    }
    if (bottom < 0) return BlockCoefficients{1, 1};
    int64_t h = bottom - top, w = right - left;
    if (h < 3 || w < 3) return BlockCoefficients{std::max<int64_t>(1, h), std::max<int64_t>(1, w)};
    return sample_training_coefficients(h, w, rng);
}

}  // namespace envanim
