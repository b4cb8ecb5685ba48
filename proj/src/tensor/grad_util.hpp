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

#pragma once

#include <span>

#include "mmvp/tensor.hpp"

namespace mmvp::detail {

// Gradient buffer of a captured input, zero-filled on first use.
template <typename T>
std::span<T> grad_buffer(const Tensor<T>& t) {
    auto& g = t.impl()->grad;
    if (g.empty()) g.assign(t.numel(), T(0));
    return g;
}

}  // namespace mmvp::detail
