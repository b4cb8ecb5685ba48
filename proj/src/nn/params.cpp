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

#include <cmath>

#include "mmvp/nn.hpp"

namespace mmvp::nn {

template <typename T>
Tensor<T> ParamStore<T>::add(const std::string& name, Shape shape, Init init, std::size_t fan_in, Prng& rng) {
    if (contains(name)) fail(ErrorCode::kInvalidArgument, "duplicate parameter name '" + name + "'");
    const std::size_t n = shape_numel(shape);
    std::vector<T> values(n, T(0));
    if (init == Init::kHeUniform) {
        const double bound = std::sqrt(6.0 / ((1.0 + kLeakySlope * kLeakySlope) * static_cast<double>(fan_in)));
        for (auto& v : values) v = static_cast<T>(rng.uniform(-bound, bound));
    }
    Tensor<T> t(std::move(shape), std::move(values), true);
    index_[name] = items_.size();
    items_.emplace_back(name, t);
    return t;
}

template <typename T>
const Tensor<T>& ParamStore<T>::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(ErrorCode::kInvalidArgument, "no parameter named '" + name + "'");
    return items_[it->second].second;
}

template <typename T>
Tensor<T>& ParamStore<T>::get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) fail(ErrorCode::kInvalidArgument, "no parameter named '" + name + "'");
    return items_[it->second].second;
}

template <typename T>
std::size_t ParamStore<T>::total_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : items_) n += t.numel();
    return n;
}

template <typename T>
std::size_t ParamStore<T>::count_with_prefix(const std::string& prefix) const {
    std::size_t n = 0;
    for (const auto& [name, t] : items_)
        if (name.rfind(prefix, 0) == 0) n += t.numel();
    return n;
}

template <typename T>
void ParamStore<T>::zero_grad() {
    for (auto& [name, t] : items_) t.zero_grad();
}

std::size_t conv_param_count(std::size_t c_in, std::size_t c_out, std::size_t kernel, std::size_t spatial_dims) {
    std::size_t k = 1;
    for (std::size_t i = 0; i < spatial_dims; ++i) k *= kernel;
    return c_in * c_out * k + c_out;
}

template <typename T>
Conv2d<T> Conv2d<T>::create(ParamStore<T>& store, const std::string& name, std::size_t c_in, std::size_t c_out,
                            std::size_t kernel, std::size_t stride, Prng& rng, Init init) {
    Conv2d c;
    c.weight = store.add(name + ".weight", {c_out, c_in, kernel, kernel}, init, c_in * kernel * kernel, rng);
    c.bias = store.add(name + ".bias", {c_out}, Init::kZeros, 1, rng);
    c.stride = stride;
    c.padding = kernel / 2;
    return c;
}

template <typename T>
Conv3d<T> Conv3d<T>::create(ParamStore<T>& store, const std::string& name, std::size_t c_in, std::size_t c_out,
                            std::size_t kernel, Prng& rng, Init init) {
    Conv3d c;
    c.weight = store.add(name + ".weight", {c_out, c_in, kernel, kernel, kernel}, init,
                         c_in * kernel * kernel * kernel, rng);
    c.bias = store.add(name + ".bias", {c_out}, Init::kZeros, 1, rng);
    c.padding = kernel / 2;
    return c;
}

template class ParamStore<float>;
template class ParamStore<double>;
template class ParamStore<long double>;
template struct Conv2d<float>;
template struct Conv2d<double>;
template struct Conv2d<long double>;
template struct Conv3d<float>;
template struct Conv3d<double>;
template struct Conv3d<long double>;

}  // namespace mmvp::nn
