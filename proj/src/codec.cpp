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

#include "envanim/codec.hpp"

namespace envanim {

LatentCodec::LatentCodec(int64_t patch) : patch_(patch) {
    if (patch < 1) throw std::invalid_argument("LatentCodec: patch must be >= 1");
}

Tensor LatentCodec::encode(const Tensor& frames) const {
    if (frames.rank() != 4 || frames.dim(1) != 3)
        throw std::invalid_argument("encode: expected [N,3,H,W], got " + frames.shape_str());
    const int64_t n = frames.dim(0), hh = frames.dim(2), ww = frames.dim(3), p = patch_;
    if (hh % p != 0 || ww % p != 0)
        throw std::invalid_argument("encode: spatial dims " + frames.shape_str() +
                                    " not divisible by patch " + std::to_string(p));
    const int64_t ho = hh / p, wo = ww / p;
    Tensor z({n, 3 * p * p, ho, wo});
    for (int64_t b = 0; b < n; ++b)
        for (int64_t c = 0; c < 3; ++c)
            for (int64_t dy = 0; dy < p; ++dy)
                for (int64_t dx = 0; dx < p; ++dx) {
                    const int64_t zc = (c * p + dy) * p + dx;
                    for (int64_t i = 0; i < ho; ++i)
                        for (int64_t j = 0; j < wo; ++j)
                            z.at(b, zc, i, j) = frames.at(b, c, i * p + dy, j * p + dx);
                }
    return z;
}

Tensor LatentCodec::decode(const Tensor& latents) const {
    const int64_t p = patch_;
    if (latents.rank() != 4 || latents.dim(1) != 3 * p * p)
        throw std::invalid_argument("decode: expected channel count " + std::to_string(3 * p * p) +
                                    ", got " + latents.shape_str());
    const int64_t n = latents.dim(0), ho = latents.dim(2), wo = latents.dim(3);
    Tensor x({n, 3, ho * p, wo * p});
    for (int64_t b = 0; b < n; ++b)
        for (int64_t c = 0; c < 3; ++c)
            for (int64_t dy = 0; dy < p; ++dy)
                for (int64_t dx = 0; dx < p; ++dx) {
                    const int64_t zc = (c * p + dy) * p + dx;
                    for (int64_t i = 0; i < ho; ++i)
                        for (int64_t j = 0; j < wo; ++j)
                            x.at(b, c, i * p + dy, j * p + dx) = latents.at(b, zc, i, j);
                }
    return x;
}

}  // namespace envanim
