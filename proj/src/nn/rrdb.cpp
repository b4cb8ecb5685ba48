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

#include <algorithm>

#include "mmvp/nn.hpp"

namespace mmvp::nn {

RrdbConfig RrdbConfig::for_channels(std::size_t channels) {
    RrdbConfig c;
    c.channels = channels;
    c.growth = std::max<std::size_t>(channels / 2, 4);
    return c;
}

template <typename T>
RrdbBlock<T> RrdbBlock<T>::create(ParamStore<T>& store, const std::string& name, const RrdbConfig& config,
                                  Prng& rng) {
    if (config.layers < 1 || config.blocks < 1 || !(config.beta > 0.0 && config.beta <= 1.0)) {
        fail(ErrorCode::kInvalidArgument, "RRDB needs layers >= 1, blocks >= 1 and beta in (0, 1]");
    }
    RrdbBlock block;
    block.config_ = config;
    const std::size_t c = config.channels, g = config.growth;
    for (std::size_t b = 0; b < config.blocks; ++b) {
        const std::string prefix = name + ".dense" + std::to_string(b);
        std::vector<Conv2d<T>> convs;
        for (std::size_t l = 0; l + 1 < config.layers; ++l) {
            convs.push_back(Conv2d<T>::create(store, prefix + ".conv" + std::to_string(l), c + l * g, g, 3, 1, rng));
        }
        block.inner_.push_back(std::move(convs));
        const std::size_t last_in = c + (config.layers - 1) * g;
        block.last_.push_back(Conv2d<T>::create(store, prefix + ".conv" + std::to_string(config.layers - 1), last_in,
                                                c, 3, 1, rng, Init::kZeros));
    }
    return block;
}

template <typename T>
Tensor<T> RrdbBlock<T>::run(const Tensor<T>& x, bool residual_only) const {
    if (x.rank() != 4 || x.dim(1) != config_.channels) {
        fail(ErrorCode::kShapeMismatch, "RRDB configured for " + std::to_string(config_.channels) +
                                            " channels, got input " + shape_str(x.shape()));
    }
    const T beta = static_cast<T>(config_.beta);
    const T slope = static_cast<T>(kLeakySlope);
    Tensor<T> y = x;
    Tensor<T> accumulated;
    for (std::size_t b = 0; b < config_.blocks; ++b) {
        std::vector<Tensor<T>> features{y};
        for (const auto& conv : inner_[b]) {
            const Tensor<T> in = features.size() == 1 ? features[0] : concat(features, 1);
            features.push_back(leaky_relu(conv(in), slope));
        }
        const Tensor<T> in = features.size() == 1 ? features[0] : concat(features, 1);
        Tensor<T> d = last_[b](in);
        accumulated = accumulated.defined() ? add(accumulated, d) : d;
        y = add(y, scale(d, beta));
    }
    return residual_only ? accumulated : y;
}

template <typename T>
Tensor<T> RrdbBlock<T>::forward(const Tensor<T>& x) const {
    return run(x, false);
}

template <typename T>
Tensor<T> RrdbBlock<T>::residual(const Tensor<T>& x) const {
    return run(x, true);
}

template <typename T>
std::size_t RrdbBlock<T>::param_count(const RrdbConfig& config) {
    std::size_t n = 0;
    for (std::size_t b = 0; b < config.blocks; ++b) {
        for (std::size_t l = 0; l + 1 < config.layers; ++l)
            n += conv_param_count(config.channels + l * config.growth, config.growth, 3, 2);
        n += conv_param_count(config.channels + (config.layers - 1) * config.growth, config.channels, 3, 2);
    }
    return n;
}

template class RrdbBlock<float>;
template class RrdbBlock<double>;
template class RrdbBlock<long double>;

}  // namespace mmvp::nn
