// Copyright (c) 2026 The MMVP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "../tensor/grad_util.hpp"
#include "mmvp/nn.hpp"

namespace mmvp::nn {

namespace {

// Moves values between the fine (N, C, H, W) layout and the coarse
// (N, C*r*r, H/r, W/r) layout. `to_coarse` selects the direction; the same
// index map serves both directions, so each is the exact inverse of the other.
template <typename T>
void shuffle_copy(const T* src, T* dst, std::size_t n, std::size_t c, std::size_t h, std::size_t w, std::size_t r,
                  bool to_coarse, bool accumulate) {
    const std::size_t ch = h / r, cw = w / r;
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t ci = 0; ci < c; ++ci)
            for (std::size_t dy = 0; dy < r; ++dy)
                for (std::size_t dx = 0; dx < r; ++dx) {
                    const std::size_t oc = ci * r * r + dy * r + dx;
                    const std::size_t coarse_base = (b * c * r * r + oc) * ch * cw;
                    const std::size_t fine_base = (b * c + ci) * h * w;
                    for (std::size_t y = 0; y < ch; ++y) {
                        for (std::size_t x = 0; x < cw; ++x) {
                            const std::size_t fine = fine_base + (y * r + dy) * w + x * r + dx;
                            const std::size_t coarse = coarse_base + y * cw + x;
                            const std::size_t from = to_coarse ? fine : coarse;
                            const std::size_t to = to_coarse ? coarse : fine;
                            if (accumulate) {
                                dst[to] += src[from];
                            } else {
                                dst[to] = src[from];
                            }
                        }
                    }
                }
}

}  // namespace

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, std::size_t r) {
    if (x.rank() != 4) fail(ErrorCode::kShapeMismatch, "pixel_unshuffle expects (N,C,H,W), got " + shape_str(x.shape()));
    if (r == 0) fail(ErrorCode::kInvalidArgument, "pixel_unshuffle: factor must be positive");
    const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    if (h % r != 0 || w % r != 0) {
        fail(ErrorCode::kShapeMismatch, "pixel_unshuffle: H=" + std::to_string(h) + " and W=" + std::to_string(w) +
                                            " must be divisible by r=" + std::to_string(r));
    }
    if (r == 1) return reshape(x, x.shape());
    std::vector<T> out(x.numel());
    shuffle_copy(x.data().data(), out.data(), n, c, h, w, r, true, false);
    Tensor<T> result({n, c * r * r, h / r, w / r}, std::move(out));
    record_op<T>(result, {x}, [x, n, c, h, w, r](std::span<const T> g) {
        shuffle_copy(g.data(), detail::grad_buffer(x).data(), n, c, h, w, r, false, true);
    });
    return result;
}

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, std::size_t r) {
    if (x.rank() != 4) fail(ErrorCode::kShapeMismatch, "pixel_shuffle expects (N,C,H,W), got " + shape_str(x.shape()));
    if (r == 0) fail(ErrorCode::kInvalidArgument, "pixel_shuffle: factor must be positive");
    const std::size_t n = x.dim(0), cc = x.dim(1), ch = x.dim(2), cw = x.dim(3);
    if (cc % (r * r) != 0) {
        fail(ErrorCode::kShapeMismatch, "pixel_shuffle: channel count " + std::to_string(cc) +
                                            " not divisible by r^2=" + std::to_string(r * r));
    }
    if (r == 1) return reshape(x, x.shape());
    const std::size_t c = cc / (r * r), h = ch * r, w = cw * r;
    std::vector<T> out(x.numel());
    shuffle_copy(x.data().data(), out.data(), n, c, h, w, r, false, false);
    Tensor<T> result({n, c, h, w}, std::move(out));
    record_op<T>(result, {x}, [x, n, c, h, w, r](std::span<const T> g) {
        shuffle_copy(g.data(), detail::grad_buffer(x).data(), n, c, h, w, r, true, true);
    });
    return result;
}

template Tensor<float> pixel_unshuffle<float>(const Tensor<float>&, std::size_t);
template Tensor<double> pixel_unshuffle<double>(const Tensor<double>&, std::size_t);
template Tensor<float> pixel_shuffle<float>(const Tensor<float>&, std::size_t);
template Tensor<double> pixel_shuffle<double>(const Tensor<double>&, std::size_t);
template Tensor<long double> pixel_unshuffle<long double>(const Tensor<long double>&, std::size_t);
template Tensor<long double> pixel_shuffle<long double>(const Tensor<long double>&, std::size_t);

}  // namespace mmvp::nn
