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

#include "mmvp/error.hpp"
#include "mmvp/model.hpp"
#include "mmvp/ops.hpp"

namespace mmvp {

inline constexpr double kPatchNormEps = 1e-12;

template <typename T>
MotionMatrices<T> normalize_matrix(const MotionMatrices<T>& m) {
    if (m.normalized) fail(ErrorCode::kInvalidArgument, "normalize_matrix: matrices are already normalized");
    if (m.values.rank() != 4) {
        fail(ErrorCode::kShapeMismatch, "motion matrices must be (N, count, hw, hw), got " + shape_str(m.values.shape()));
    }
    return {softmax(m.values, {3}), true};
}

template <typename T>
MotionMatrices<T> build_motion_matrices(const Tensor<T>& g) {
    if (g.rank() != 4) fail(ErrorCode::kShapeMismatch, "expected g as (N, T, C, hw), got " + shape_str(g.shape()));
    const std::size_t n = g.dim(0), t = g.dim(1), c = g.dim(2), hw = g.dim(3);
    if (t < 2) fail(ErrorCode::kInvalidArgument, "at least two frames are needed to build a motion matrix");
    const Tensor<T> unit = normalize_vectors(g, 2, static_cast<T>(kPatchNormEps));
    const Tensor<T> src = reshape(slice(unit, 1, 0, t - 1), {n * (t - 1), c, hw});
    const Tensor<T> dst = reshape(slice(unit, 1, 1, t - 1), {n * (t - 1), c, hw});
    return {reshape(bmm(src, dst, true, false), {n, t - 1, hw, hw}), false};
}

template <typename T>
Tensor<T> compose_flat(const Tensor<T>& x, const Tensor<T>& chain, const Tensor<T>& future, bool average) {
    if (x.rank() != 4) fail(ErrorCode::kShapeMismatch, "compose: sources must be (N, T, D, hw), got " + shape_str(x.shape()));
    const std::size_t n = x.dim(0), t = x.dim(1), d = x.dim(2), hw = x.dim(3);
    if (future.rank() != 4 || future.dim(0) != n || future.dim(2) != hw || future.dim(3) != hw) {
        fail(ErrorCode::kShapeMismatch, "compose: future matrices " + shape_str(future.shape()) +
                                            " do not match sources " + shape_str(x.shape()));
    }
    if (t > 1) {
        if (!chain.defined() || chain.rank() != 4 || chain.dim(0) != n || chain.dim(1) != t - 1 || chain.dim(2) != hw ||
            chain.dim(3) != hw) {
            fail(ErrorCode::kShapeMismatch, "compose: chain matrices do not match sources " + shape_str(x.shape()));
        }
    }
    const std::size_t tp = future.dim(1);
    // Horner form: Z_1 = x_1, Z_{i+1} = Z_i M_i + x_{i+1}; then out_j = Z_T Mhat_j.
    Tensor<T> z = reshape(slice(x, 1, 0, 1), {n, d, hw});
    for (std::size_t i = 1; i < t; ++i) {
        const Tensor<T> m = reshape(slice(chain, 1, i - 1, 1), {n, hw, hw});
        z = add(bmm(z, m), reshape(slice(x, 1, i, 1), {n, d, hw}));
    }
    // All future matrices side by side: (N, hw_src, T' * hw_tgt), one product per clip.
    const Tensor<T> wide = reshape(permute(future, {0, 2, 1, 3}), {n, hw, tp * hw});
    Tensor<T> out = permute(reshape(bmm(z, wide), {n, d, tp, hw}), {0, 2, 1, 3});
    if (average) out = scale(out, static_cast<T>(1.0 / static_cast<double>(t)));
    return out;
}

template <typename T>
Tensor<T> to_grid(const Tensor<T>& x, std::size_t grid_h) {
    const std::size_t h = x.dim(2);
    if (h >= grid_h) {
        if (h % grid_h != 0) fail(ErrorCode::kShapeMismatch, "feature height " + std::to_string(h) + " is not a multiple of the grid");
        return nn::pixel_unshuffle(x, h / grid_h);
    }
    if (grid_h % h != 0) fail(ErrorCode::kShapeMismatch, "grid height is not a multiple of feature height " + std::to_string(h));
    return nn::pixel_shuffle(x, grid_h / h);
}

template <typename T>
Tensor<T> from_grid(const Tensor<T>& x, std::size_t height) {
    const std::size_t gh = x.dim(2);
    if (height >= gh) return nn::pixel_shuffle(x, height / gh);
    return nn::pixel_unshuffle(x, gh / height);
}

#define MMVP_INSTANTIATE(T)                                                                          \
    template MotionMatrices<T> normalize_matrix<T>(const MotionMatrices<T>&);                        \
    template MotionMatrices<T> build_motion_matrices<T>(const Tensor<T>&);                           \
    template Tensor<T> compose_flat<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, bool); \
    template Tensor<T> to_grid<T>(const Tensor<T>&, std::size_t);                                   \
    template Tensor<T> from_grid<T>(const Tensor<T>&, std::size_t);

MMVP_INSTANTIATE(float)
MMVP_INSTANTIATE(double)
MMVP_INSTANTIATE(long double)

#undef MMVP_INSTANTIATE

}  // namespace mmvp
