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

// Motion-matrix video predictor.
//
// Pipeline for a batch of N clips with T observed frames:
//   encode   every frame independently into a stride-2 feature pyramid
//   filter   the 1/S level into g (used only to build matrices)
//   build    cosine-similarity matrices between consecutive g frames
//   predict  T' future matrices anchored at the last observed frame
//   compose  future features at every scale from all observed frames
//   decode   UNet-style, coarse to fine, into T' frames
//
// Matrices are stored as (N, count, hw_src, hw_tgt) with hw = (H/S)(W/S);
// row p of a normalized matrix is a distribution over target patches.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmvp/nn.hpp"
#include "mmvp/tensor.hpp"

namespace mmvp {

struct ModelConfig {
    std::size_t H = 64, W = 64, C_in = 1;
    std::size_t T = 10, T_prime = 10;
    std::size_t C_img = 16, C_motion = 32;
    std::size_t S = 4;
    std::vector<double> scales{1.0, 0.5, 0.25, 0.125};
    bool include_image = true;
    bool average_composition = false;
    bool use_filter = true;

    /// Throws kConfigInvalid naming the violated rule.
    void validate() const;

    /// Pyramid level (log2 of the downscale) of each configured scale.
    std::vector<std::size_t> scale_levels() const;
    /// Levels whose features take part in composition, ascending. With
    /// include_image the largest configured scale is dropped (the raw frame
    /// stands in for it).
    std::vector<std::size_t> composition_levels() const;
    std::size_t matrix_level() const;  // log2(S)
    std::size_t top_level() const;     // deepest encoder level
    std::size_t channels_at(std::size_t level) const { return C_img << level; }
    std::size_t grid_h() const { return H / S; }
    std::size_t grid_w() const { return W / S; }
    std::size_t grid_size() const { return grid_h() * grid_w(); }
    /// Future steps produced per predictor time slot: ceil(T' / (T-1)).
    std::size_t predictor_repeats() const { return (T_prime + T - 2) / (T - 1); }

    bool operator==(const ModelConfig&) const = default;
};

/// A stack of motion matrices with its normalization state.
template <typename T>
struct MotionMatrices {
    Tensor<T> values;  // (N, count, hw_src, hw_tgt)
    bool normalized = false;
};

/// Softmax over the target axis of every row. Rejects already-normalized input.
template <typename T>
MotionMatrices<T> normalize_matrix(const MotionMatrices<T>& m);

/// Cosine similarity between every patch of frame i and every patch of frame
/// i+1. `g` is (N, T, C, hw); result is (N, T-1, hw, hw). Patches with norm
/// below 1e-12 have similarity 0.
template <typename T>
MotionMatrices<T> build_motion_matrices(const Tensor<T>& g);

/// Composition on flattened sources. `x` is (N, T, D, hw) (patch vectors in
/// columns), `chain` the T-1 normalized consecutive matrices (undefined when
/// T = 1) and `future` the T' normalized predicted matrices. Returns
/// (N, T', D, hw) with
///   out_j = sum_i x_i * M_i * M_{i+1} * ... * M_{T-1} * Mhat_j
/// optionally divided by T.
template <typename T>
Tensor<T> compose_flat(const Tensor<T>& x, const Tensor<T>& chain, const Tensor<T>& future, bool average);

/// Moves a (B, C, H_s, W_s) map onto the (H/S, W/S) grid: unshuffle when the
/// map is finer than the grid, shuffle when coarser.
template <typename T>
Tensor<T> to_grid(const Tensor<T>& x, std::size_t grid_h);
/// Inverse of to_grid back to spatial height `height`.
template <typename T>
Tensor<T> from_grid(const Tensor<T>& x, std::size_t height);

struct ParamBreakdown {
    std::size_t encoder = 0, filter = 0, predictor = 0, decoder = 0, total = 0;
};

template <typename T>
class Model {
  public:
    struct Pyramid {
        std::map<std::size_t, Tensor<T>> levels;  // level -> (N*T, C_level, H>>level, W>>level)
        Tensor<T> g;                              // (N*T, C_g, H/S, W/S)
    };
    struct Composed {
        std::map<std::size_t, Tensor<T>> levels;  // level -> (N*T', C_level, ...)
        Tensor<T> image;                          // (N*T', C_in, H, W), undefined without include_image
    };
    struct Output {
        Tensor<T> predictions;  // (N, T', C_in, H, W), unclamped
        Tensor<T> loss;         // undefined without targets
        MotionMatrices<T> raw;
        MotionMatrices<T> future;  // normalized
    };

    Model(const ModelConfig& config, std::uint64_t seed);

    const ModelConfig& config() const { return config_; }
    nn::ParamStore<T>& params() { return params_; }
    const nn::ParamStore<T>& params() const { return params_; }
    ParamBreakdown count_params() const;

    /// frames: (N*T, C_in, H, W). Levels used later are present in the result.
    Pyramid encode(const Tensor<T>& frames) const;
    /// f: the matrix-level feature map. Identity when use_filter is off.
    Tensor<T> filter(const Tensor<T>& f) const;
    /// raw: (N, T-1, hw, hw) cosine matrices. Returns (N, T', hw, hw) unnormalized.
    MotionMatrices<T> predict_matrices(const MotionMatrices<T>& raw) const;
    /// Composes every configured source. frames: (N*T, C_in, H, W).
    Composed compose(const Pyramid& pyramid, const Tensor<T>& frames, std::size_t batch,
                     const MotionMatrices<T>& raw_normalized, const MotionMatrices<T>& future_normalized) const;
    /// Returns (N*T', C_in, H, W).
    Tensor<T> decode(const Composed& composed) const;

    /// frames: (N, T, C_in, H, W); targets: (N, T', C_in, H, W) or undefined.
    Output forward(const Tensor<T>& frames, const Tensor<T>& targets) const;
    /// Inference without a tape; predictions clamped to [0, 1].
    Tensor<T> predict(const Tensor<T>& frames) const;

  private:
    ModelConfig config_;
    nn::ParamStore<T> params_;
    std::vector<std::size_t> comp_levels_;

    nn::Conv2d<T> stem_;
    std::map<std::size_t, nn::Conv2d<T>> down_;
    std::map<std::size_t, nn::RrdbBlock<T>> enc_rrdb_;
    nn::Conv2d<T> filter1_, filter2_;
    nn::Conv3d<T> pred1_, pred2_, pred3_;
    std::map<std::size_t, nn::Conv2d<T>> up_;
    std::map<std::size_t, nn::Conv2d<T>> fuse_;
    std::map<std::size_t, nn::RrdbBlock<T>> dec_rrdb_;
    nn::Conv2d<T> head_;
};

}  // namespace mmvp
