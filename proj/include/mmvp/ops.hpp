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

// Differentiable tensor operations. Every op records its backward rule on the
// active tape when at least one input requires grad.

#pragma once

#include <cstddef>
#include <vector>

#include "mmvp/tensor.hpp"

namespace mmvp {

enum class ElementwiseKind { kAdd, kSub, kMul, kScale };

template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, const Tensor<T>& b, ElementwiseKind kind);
/// Scalar right-hand side. kScale and kMul both multiply.
template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, T b, ElementwiseKind kind);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) { return elementwise(a, b, ElementwiseKind::kAdd); }
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) { return elementwise(a, b, ElementwiseKind::kSub); }
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) { return elementwise(a, b, ElementwiseKind::kMul); }
template <typename T>
Tensor<T> scale(const Tensor<T>& a, T s) { return elementwise(a, s, ElementwiseKind::kScale); }

/// (m x k) . (k x n)
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

/// Batched product over rank-3 tensors; op(a) is (B,m,k), op(b) is (B,k,n).
template <typename T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b, bool trans_a = false, bool trans_b = false);

/// Cross-correlation with zero padding. `bias` may be undefined.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias, std::size_t stride,
                 std::size_t padding);

template <typename T>
Tensor<T> conv3d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias, std::size_t stride,
                 std::size_t padding);

/// Softmax normalized jointly over `axes`.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, const std::vector<std::size_t>& axes);

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope);

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target);

template <typename T>
Tensor<T> sum(const Tensor<T>& x);

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

template <typename T>
Tensor<T> permute(const Tensor<T>& x, const std::vector<std::size_t>& order);

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis);

template <typename T>
Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::size_t start, std::size_t length);

/// Scales every vector along `axis` to unit L2 norm. Vectors with norm below
/// `eps` map to zero.
template <typename T>
Tensor<T> normalize_vectors(const Tensor<T>& x, std::size_t axis, T eps);

/// Inference-only clamp; never recorded.
template <typename T>
Tensor<T> clamp(const Tensor<T>& x, T lo, T hi);

namespace detail {

/// Row-major C = alpha * op(A) * op(B) + beta * C.
template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          const T* b, T beta, T* c);

std::vector<std::size_t> strides_of(const Shape& shape);

template <typename T>
void permute_into(const T* src, const Shape& shape, const std::vector<std::size_t>& order, T* dst);

}  // namespace detail

}  // namespace mmvp
