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

#include "mmvp/error.hpp"
#include "mmvp/train.hpp"

namespace mmvp::train {

template <typename T>
void AdamW<T>::step(nn::ParamStore<T>& params, double lr) {
    for (const auto& [name, p] : params.items()) {
        if (!p.has_grad()) fail(ErrorCode::kInvalidArgument, "adamw: parameter " + name + " has no gradient");
    }
    ++steps_;
    const double b1 = options_.beta1, b2 = options_.beta2;
    const T bc1 = static_cast<T>(1.0 - std::pow(b1, double(steps_)));
    const T bc2 = static_cast<T>(1.0 - std::pow(b2, double(steps_)));
    const T lr_t = static_cast<T>(lr), decay = static_cast<T>(lr * options_.weight_decay);
    const T eps = static_cast<T>(options_.eps), tb1 = static_cast<T>(b1), tb2 = static_cast<T>(b2);
    for (const auto& [name, p] : params.items()) {
        Tensor<T> param = p;
        auto& mom = moments_[name];
        const std::size_t n = param.numel();
        if (mom.m.size() != n) {
            mom.m.assign(n, T(0));
            mom.v.assign(n, T(0));
        }
        const auto g = param.grad();
        auto theta = param.mutable_data();
        for (std::size_t i = 0; i < n; ++i) {
            mom.m[i] = tb1 * mom.m[i] + (T(1) - tb1) * g[i];
            mom.v[i] = tb2 * mom.v[i] + (T(1) - tb2) * g[i] * g[i];
            const T mhat = mom.m[i] / bc1;
            const T vhat = mom.v[i] / bc2;
            theta[i] -= decay * theta[i] + lr_t * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

template class AdamW<float>;
template class AdamW<double>;

}  // namespace mmvp::train
