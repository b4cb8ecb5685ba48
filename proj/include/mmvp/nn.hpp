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

// Network building blocks: parameter storage, convolution layers, pixel
// shuffle/unshuffle and residual-in-residual dense blocks.

#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mmvp/ops.hpp"
#include "mmvp/prng.hpp"
#include "mmvp/tensor.hpp"

namespace mmvp::nn {

inline constexpr double kLeakySlope = 0.2;

enum class Init {
    kHeUniform,  // U(-b, b), b = sqrt(6 / ((1 + slope^2) * fan_in))
    kZeros,
};

/// Named, ordered collection of trainable tensors.
template <typename T>
class ParamStore {
  public:
    /// Creates and registers a parameter. Names must be unique.
    Tensor<T> add(const std::string& name, Shape shape, Init init, std::size_t fan_in, Prng& rng);

    const std::vector<std::pair<std::string, Tensor<T>>>& items() const { return items_; }
    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    const Tensor<T>& get(const std::string& name) const;
    Tensor<T>& get(const std::string& name);

    std::size_t total_count() const;
    std::size_t count_with_prefix(const std::string& prefix) const;
    void zero_grad();

  private:
    std::vector<std::pair<std::string, Tensor<T>>> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

template <typename T>
struct Conv2d {
    Tensor<T> weight;  // (c_out, c_in, k, k)
    Tensor<T> bias;    // (c_out)
    std::size_t stride = 1;
    std::size_t padding = 1;

    static Conv2d create(ParamStore<T>& store, const std::string& name, std::size_t c_in, std::size_t c_out,
                         std::size_t kernel, std::size_t stride, Prng& rng, Init init = Init::kHeUniform);
    Tensor<T> operator()(const Tensor<T>& x) const { return conv2d(x, weight, bias, stride, padding); }
};

template <typename T>
struct Conv3d {
    Tensor<T> weight;  // (c_out, c_in, k, k, k)
    Tensor<T> bias;
    std::size_t padding = 1;

    static Conv3d create(ParamStore<T>& store, const std::string& name, std::size_t c_in, std::size_t c_out,
                         std::size_t kernel, Prng& rng, Init init = Init::kHeUniform);
    Tensor<T> operator()(const Tensor<T>& x) const { return conv3d(x, weight, bias, 1, padding); }
};

/// (N, C, H, W) -> (N, C*r*r, H/r, W/r) with
/// out[n, c*r*r + dy*r + dx, y, x] = in[n, c, y*r + dy, x*r + dx].
template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, std::size_t r);

/// Exact inverse of pixel_unshuffle: (N, C*r*r, h, w) -> (N, C, h*r, w*r).
template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, std::size_t r);

struct RrdbConfig {
    std::size_t channels = 16;
    std::size_t growth = 8;
    std::size_t layers = 3;  // convs per dense block
    std::size_t blocks = 2;  // dense blocks per RRDB
    double beta = 0.2;

    /// Default layout for a given width: growth = max(channels / 2, 4).
    static RrdbConfig for_channels(std::size_t channels);
};

/// Residual-in-residual dense block. Each dense block k computes
///   D_k(y) = conv_L(cat(y, o_1, ..., o_{L-1})),  o_l = lrelu(conv_l(cat(y, o_1..o_{l-1})))
/// and the block output is y_B with y_0 = x, y_k = y_{k-1} + beta * D_k(y_{k-1}),
/// so out = x + beta * F(x) with F(x) = sum_k D_k(y_{k-1}). The last conv of
/// every dense block starts at zero, making a fresh block the identity.
template <typename T>
class RrdbBlock {
  public:
    RrdbBlock() = default;
    static RrdbBlock create(ParamStore<T>& store, const std::string& name, const RrdbConfig& config, Prng& rng);

    Tensor<T> forward(const Tensor<T>& x) const;
    /// F(x), the accumulated dense-block residuals.
    Tensor<T> residual(const Tensor<T>& x) const;

    const RrdbConfig& config() const { return config_; }
    /// Final conv of each dense block.
    std::vector<Conv2d<T>>& last_convs() { return last_; }

    static std::size_t param_count(const RrdbConfig& config);

  private:
    Tensor<T> run(const Tensor<T>& x, bool residual_only) const;

    RrdbConfig config_;
    std::vector<std::vector<Conv2d<T>>> inner_;  // per block, the first L-1 convs
    std::vector<Conv2d<T>> last_;
};

std::size_t conv_param_count(std::size_t c_in, std::size_t c_out, std::size_t kernel, std::size_t spatial_dims);

}  // namespace mmvp::nn
