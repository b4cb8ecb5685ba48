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

// Central finite-difference gradient verification.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mmvp/tensor.hpp"

namespace mmvp {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst;  // "<tensor>[<index>]" of the worst element
    std::size_t checked = 0;
};

/// Compares the autodiff gradient of scalar `loss_fn()` with respect to every
/// tensor in `params` against (f(x+h e) - f(x-h e)) / 2h. Relative error per
/// element is |numeric - analytic| / max(|analytic|, 1e-8).
/// `stride` > 1 checks every stride-th element of each tensor (sampled
/// deterministically, always including index 0).
template <typename T>
GradCheckResult finite_diff_check_params(const std::function<Tensor<T>()>& loss_fn, std::vector<Tensor<T>> params,
                                         const std::vector<std::string>& names, T h, std::size_t stride = 1) {
    for (auto& p : params) {
        p.set_requires_grad(true);
        p.zero_grad();
    }
    {
        Tape<T> tape;
        TapeScope<T> scope(tape);
        Tensor<T> loss = loss_fn();
        tape.backward(loss);
    }
    GradCheckResult result;
    NoGradScope<T> no_grad;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& p = params[pi];
        const auto analytic = p.grad_or_zeros();
        auto data = p.mutable_data();
        for (std::size_t i = 0; i < data.size(); i += std::max<std::size_t>(stride, 1)) {
            const T saved = data[i];
            data[i] = saved + h;
            const T up = loss_fn().item();
            data[i] = saved - h;
            const T down = loss_fn().item();
            data[i] = saved;
            // Difference in the working precision before narrowing.
            const double numeric = static_cast<double>((up - down) / (T(2) * h));
            const double a = static_cast<double>(analytic[i]);
            const double rel = std::abs(numeric - a) / std::max(std::abs(a), 1e-8);
            ++result.checked;
            if (result.worst.empty() || rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst =
                    (pi < names.size() ? names[pi] : "param" + std::to_string(pi)) + "[" + std::to_string(i) + "]";
            }
        }
    }
    return result;
}

/// Single-input form: max relative error of d f(x) / dx.
template <typename T>
double finite_diff_check(const std::function<Tensor<T>(const Tensor<T>&)>& f, Tensor<T> x, T h) {
    Tensor<T> input = x.detach();
    auto loss_fn = [&]() { return f(input); };
    return finite_diff_check_params<T>(loss_fn, {input}, {"x"}, h).max_rel_error;
}

}  // namespace mmvp
