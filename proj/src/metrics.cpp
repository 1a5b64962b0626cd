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

#include "envanim/metrics.hpp"

#include <cmath>
#include <vector>

namespace envanim {

namespace {

constexpr double kPsnrCap = 99.0;
constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_window() {
    std::vector<double> w(kWin * kWin);
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
            double dy = i - (kWin - 1) / 2.0;
            double dx = j - (kWin - 1) / 2.0;
            w[i * kWin + j] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
            sum += w[i * kWin + j];
        }
    for (double& x : w) x /= sum;
    return w;
}

// Rec.601 luma; accepts [3,H,W] or [H,W].
Tensor to_luma(const Tensor& img) {
    if (img.rank() == 2) return img;
    if (img.rank() != 3 || img.dim(0) != 3)
        throw std::invalid_argument("ssim: expected [3,H,W] or [H,W], got " + img.shape_str());
    Tensor out({img.dim(1), img.dim(2)});
    for (int64_t r = 0; r < img.dim(1); ++r)
        for (int64_t c = 0; c < img.dim(2); ++c)
            out.at(r, c) = 0.299 * img.at(0, r, c) + 0.587 * img.at(1, r, c) + 0.114 * img.at(2, r, c);
    return out;
}

}  // namespace

double psnr(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
    if (a.size() == 0) throw std::invalid_argument("psnr: empty input");
    double mse = 0.0;
    for (int64_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(10.0 * std::log10(1.0 / mse), kPsnrCap);
}

double ssim(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("ssim: shape mismatch");
    Tensor x = to_luma(a), y = to_luma(b);
    const int64_t h = x.dim(0), w = x.dim(1);
    if (h < kWin || w < kWin)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    static const std::vector<double> win = gaussian_window();
    double total = 0.0;
    int64_t count = 0;
    for (int64_t r = 0; r + kWin <= h; ++r) {
        for (int64_t c = 0; c + kWin <= w; ++c) {
            double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
            for (int i = 0; i < kWin; ++i)
                for (int j = 0; j < kWin; ++j) {
                    double wv = win[i * kWin + j];
                    double xv = x.at(r + i, c + j), yv = y.at(r + i, c + j);
                    mx += wv * xv;
                    my += wv * yv;
                    mxx += wv * xv * xv;
                    myy += wv * yv * yv;
                    mxy += wv * xv * yv;
                }
            double vx = mxx - mx * mx, vy = myy - my * my, cov = mxy - mx * my;
            double num = (2 * mx * my + kC1) * (2 * cov + kC2);
            double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double boundary_discontinuity(const Tensor& video, int64_t clip_len) {
    if (video.rank() != 4) throw std::invalid_argument("boundary_discontinuity: expected [F,3,H,W]");
    if (clip_len < 1 || video.dim(0) % clip_len != 0)
        throw std::invalid_argument("boundary_discontinuity: frame count not a multiple of clip_len");
    const int64_t clips = video.dim(0) / clip_len;
    if (clips < 2) throw std::invalid_argument("boundary_discontinuity: need at least two clips");
    const int64_t frame_sz = video.dim(1) * video.dim(2) * video.dim(3);
    double total = 0.0;
    for (int64_t k = 0; k + 1 < clips; ++k) {
        const double* last = video.data() + (k * clip_len + clip_len - 1) * frame_sz;
        const double* first = video.data() + (k + 1) * clip_len * frame_sz;
        double mad = 0.0;
        for (int64_t i = 0; i < frame_sz; ++i) mad += std::abs(last[i] - first[i]);
        total += mad / static_cast<double>(frame_sz);
    }
    return total / static_cast<double>(clips - 1);
}

VideoScores video_scores(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b) || a.rank() != 4)
        throw std::invalid_argument("video_scores: expected matching [N,3,H,W]");
    const int64_t n = a.dim(0), fsz = a.dim(1) * a.dim(2) * a.dim(3);
    VideoScores s;
    for (int64_t f = 0; f < n; ++f) {
        Tensor fa({a.dim(1), a.dim(2), a.dim(3)}), fb = fa;
        for (int64_t i = 0; i < fsz; ++i) {
            fa[i] = a[f * fsz + i];
            fb[i] = b[f * fsz + i];
        }
        s.psnr += psnr(fa, fb);
        s.ssim += ssim(fa, fb);
    }
    s.psnr /= static_cast<double>(n);
    s.ssim /= static_cast<double>(n);
    return s;
}

}  // namespace envanim
