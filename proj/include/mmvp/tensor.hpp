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

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mmvp/error.hpp"

namespace mmvp {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

template <typename T>
struct TensorImpl {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;  // empty until a gradient has been accumulated
    bool requires_grad = false;
};

/// Dense row-major tensor handle. Copies share storage; treat values produced
/// by operations as immutable. Only leaves (parameters) are updated in place.
template <typename T>
class Tensor {
  public:
    using value_type = T;

    Tensor() = default;
    Tensor(Shape shape, std::vector<T> data, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, T value, bool requires_grad = false);
    static Tensor scalar(T value, bool requires_grad = false);

    bool defined() const noexcept { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    std::size_t dim(std::size_t axis) const { return impl_->shape.at(axis); }
    std::size_t rank() const { return impl_->shape.size(); }
    std::size_t numel() const { return impl_->data.size(); }

    std::span<const T> data() const { return impl_->data; }
    std::span<T> mutable_data() { return impl_->data; }
    T item() const;
    T at(std::initializer_list<std::size_t> index) const;

    bool requires_grad() const { return impl_ && impl_->requires_grad; }
    void set_requires_grad(bool value) { impl_->requires_grad = value; }

    bool has_grad() const { return impl_ && !impl_->grad.empty(); }
    std::span<const T> grad() const { return impl_->grad; }
    /// Gradient storage, allocated as zeros on first access.
    std::span<T> mutable_grad();
    /// Gradient values, or zeros when nothing was accumulated.
    std::vector<T> grad_or_zeros() const;
    void zero_grad() { impl_->grad.clear(); }

    /// Fresh tensor with copied data, detached from any tape.
    Tensor detach() const;

    const std::shared_ptr<TensorImpl<T>>& impl() const { return impl_; }

  private:
    std::shared_ptr<TensorImpl<T>> impl_;
};

/// Ordered record of differentiable operations. Backward runs strictly in
/// reverse recording order and releases the recorded graph afterwards.
template <typename T>
class Tape {
  public:
    using BackwardFn = std::function<void(std::span<const T> grad_out)>;

    struct Entry {
        std::shared_ptr<TensorImpl<T>> output;
        std::vector<std::shared_ptr<TensorImpl<T>>> inputs;
        BackwardFn backward;
    };

    void record(const Tensor<T>& output, const std::vector<Tensor<T>>& inputs, BackwardFn fn);
    void backward(const Tensor<T>& loss);
    void clear() { entries_.clear(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

  private:
    std::vector<Entry> entries_;
};

template <typename T>
Tape<T>* active_tape();

/// Installs a tape as the thread's recording target for its lifetime.
template <typename T>
class TapeScope {
  public:
    explicit TapeScope(Tape<T>& tape);
    ~TapeScope();
    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

  private:
    Tape<T>* previous_;
};

/// Suspends recording, for inference and optimizer updates.
template <typename T>
class NoGradScope {
  public:
    NoGradScope();
    ~NoGradScope();
    NoGradScope(const NoGradScope&) = delete;
    NoGradScope& operator=(const NoGradScope&) = delete;

  private:
    Tape<T>* previous_;
};

/// True when the active tape should record an op over these inputs.
template <typename T>
bool should_record(const std::vector<Tensor<T>>& inputs);

/// Records `fn` for `output` when recording is required. Marks the output as
/// requiring grad in that case.
template <typename T>
void record_op(Tensor<T>& output, const std::vector<Tensor<T>>& inputs,
               typename Tape<T>::BackwardFn fn);

/// Runs backward on the active tape.
template <typename T>
void backward(const Tensor<T>& loss);

}  // namespace mmvp
