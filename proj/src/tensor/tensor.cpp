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

#include "mmvp/tensor.hpp"

#include <algorithm>
#include <sstream>

namespace mmvp {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "invalid argument";
        case ErrorCode::kShapeMismatch: return "shape mismatch";
        case ErrorCode::kIo: return "i/o error";
        case ErrorCode::kBadMagic: return "bad magic";
        case ErrorCode::kUnsupportedVersion: return "unsupported version";
        case ErrorCode::kUnsupportedDtype: return "unsupported dtype";
        case ErrorCode::kTruncatedPayload: return "truncated payload";
        case ErrorCode::kUnknownKey: return "unknown key";
        case ErrorCode::kTypeMismatch: return "type mismatch";
        case ErrorCode::kConfigInvalid: return "invalid config";
        case ErrorCode::kOutOfRange: return "out of range";
        case ErrorCode::kInternal: return "internal error";
    }
    return "error";
}

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ')';
    return os.str();
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data, bool requires_grad)
    : impl_(std::make_shared<TensorImpl<T>>()) {
    for (auto d : shape) {
        if (d == 0) fail(ErrorCode::kInvalidArgument, "tensor dimensions must be positive, got " + shape_str(shape));
    }
    if (shape_numel(shape) != data.size()) {
        fail(ErrorCode::kShapeMismatch, "tensor shape " + shape_str(shape) + " does not match " +
                                            std::to_string(data.size()) + " elements");
    }
    impl_->shape = std::move(shape);
    impl_->data = std::move(data);
    impl_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
    return Tensor({1}, {value}, requires_grad);
}

template <typename T>
T Tensor<T>::item() const {
    if (numel() != 1) fail(ErrorCode::kShapeMismatch, "item() on tensor of shape " + shape_str(shape()));
    return impl_->data[0];
}

template <typename T>
T Tensor<T>::at(std::initializer_list<std::size_t> index) const {
    const auto& s = shape();
    if (index.size() != s.size()) fail(ErrorCode::kInvalidArgument, "index rank does not match " + shape_str(s));
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (auto i : index) {
        if (i >= s[axis]) fail(ErrorCode::kOutOfRange, "index out of range for " + shape_str(s));
        flat = flat * s[axis] + i;
        ++axis;
    }
    return impl_->data[flat];
}

template <typename T>
std::span<T> Tensor<T>::mutable_grad() {
    if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), T(0));
    return impl_->grad;
}

template <typename T>
std::vector<T> Tensor<T>::grad_or_zeros() const {
    if (impl_->grad.empty()) return std::vector<T>(impl_->data.size(), T(0));
    return impl_->grad;
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
    return Tensor(impl_->shape, impl_->data, false);
}

template <typename T>
void Tape<T>::record(const Tensor<T>& output, const std::vector<Tensor<T>>& inputs, BackwardFn fn) {
    Entry e;
    e.output = output.impl();
    e.inputs.reserve(inputs.size());
    for (const auto& in : inputs) e.inputs.push_back(in.impl());
    e.backward = std::move(fn);
    entries_.push_back(std::move(e));
}

template <typename T>
void Tape<T>::backward(const Tensor<T>& loss) {
    if (!loss.defined() || loss.numel() != 1) {
        fail(ErrorCode::kShapeMismatch,
             "backward requires a scalar loss, got " + (loss.defined() ? shape_str(loss.shape()) : std::string("undefined")));
    }
    auto it = std::find_if(entries_.rbegin(), entries_.rend(),
                           [&](const Entry& e) { return e.output == loss.impl(); });
    if (it == entries_.rend()) fail(ErrorCode::kInvalidArgument, "backward: loss was not recorded on this tape");

    loss.impl()->grad.assign(1, T(1));
    for (; it != entries_.rend(); ++it) {
        auto& out = *it->output;
        if (out.grad.empty()) continue;
        it->backward(out.grad);
        // intermediate gradients are not retained
        std::vector<T>().swap(out.grad);
        it->backward = nullptr;
    }
    entries_.clear();
}

namespace {

template <typename T>
Tape<T>*& tape_slot() {
    thread_local Tape<T>* slot = nullptr;
    return slot;
}

}  // namespace

template <typename T>
Tape<T>* active_tape() {
    return tape_slot<T>();
}

template <typename T>
TapeScope<T>::TapeScope(Tape<T>& tape) : previous_(tape_slot<T>()) {
    tape_slot<T>() = &tape;
}

template <typename T>
TapeScope<T>::~TapeScope() {
    tape_slot<T>() = previous_;
}

template <typename T>
NoGradScope<T>::NoGradScope() : previous_(tape_slot<T>()) {
    tape_slot<T>() = nullptr;
}

template <typename T>
NoGradScope<T>::~NoGradScope() {
    tape_slot<T>() = previous_;
}

template <typename T>
bool should_record(const std::vector<Tensor<T>>& inputs) {
    if (tape_slot<T>() == nullptr) return false;
    return std::any_of(inputs.begin(), inputs.end(), [](const Tensor<T>& t) { return t.requires_grad(); });
}

template <typename T>
void record_op(Tensor<T>& output, const std::vector<Tensor<T>>& inputs, typename Tape<T>::BackwardFn fn) {
    if (!should_record(inputs)) return;
    output.set_requires_grad(true);
    tape_slot<T>()->record(output, inputs, std::move(fn));
}

template <typename T>
void backward(const Tensor<T>& loss) {
    auto* tape = tape_slot<T>();
    if (tape == nullptr) fail(ErrorCode::kInvalidArgument, "backward: no active tape");
    tape->backward(loss);
}

#define MMVP_INSTANTIATE(T)                                                                  \
    template class Tensor<T>;                                                                \
    template class Tape<T>;                                                                  \
    template class TapeScope<T>;                                                             \
    template class NoGradScope<T>;                                                           \
    template Tape<T>* active_tape<T>();                                                      \
    template bool should_record<T>(const std::vector<Tensor<T>>&);                           \
    template void record_op<T>(Tensor<T>&, const std::vector<Tensor<T>>&, Tape<T>::BackwardFn); \
    template void backward<T>(const Tensor<T>&);

MMVP_INSTANTIATE(float)
MMVP_INSTANTIATE(double)
MMVP_INSTANTIATE(long double)

#undef MMVP_INSTANTIATE

}  // namespace mmvp
