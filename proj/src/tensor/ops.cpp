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

#include "mmvp/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grad_util.hpp"

namespace mmvp {

using detail::grad_buffer;

namespace detail {

std::vector<std::size_t> strides_of(const Shape& shape) {
    std::vector<std::size_t> s(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;) s[i - 1] = s[i] * shape[i];
    return s;
}

template <typename T>
void permute_into(const T* src, const Shape& shape, const std::vector<std::size_t>& order, T* dst) {
    const std::size_t rank = shape.size();
    const auto src_strides = strides_of(shape);
    Shape dst_shape(rank);
    std::vector<std::size_t> step(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        dst_shape[i] = shape[order[i]];
        step[i] = src_strides[order[i]];
    }
    const std::size_t total = shape_numel(shape);
    if (rank == 0 || total == 0) return;
    const std::size_t inner = dst_shape[rank - 1];
    const std::size_t inner_step = step[rank - 1];
    std::vector<std::size_t> idx(rank, 0);
    std::size_t offset = 0;
    for (std::size_t out = 0; out < total; out += inner) {
        const T* s = src + offset;
        T* d = dst + out;
        if (inner_step == 1) {
            std::copy(s, s + inner, d);
        } else {
            for (std::size_t j = 0; j < inner; ++j) d[j] = s[j * inner_step];
        }
        // advance odometer over all but the innermost axis
        for (std::size_t ax = rank - 1; ax-- > 0;) {
            ++idx[ax];
            offset += step[ax];
            if (idx[ax] < dst_shape[ax]) break;
            offset -= step[ax] * idx[ax];
            idx[ax] = 0;
        }
    }
}

template void permute_into<float>(const float*, const Shape&, const std::vector<std::size_t>&, float*);
template void permute_into<double>(const double*, const Shape&, const std::vector<std::size_t>&, double*);
template void permute_into<long double>(const long double*, const Shape&, const std::vector<std::size_t>&,
                                        long double*);

}  // namespace detail

namespace {

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (a.shape() != b.shape()) {
        fail(ErrorCode::kShapeMismatch,
             std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
}

}  // namespace

template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, const Tensor<T>& b, ElementwiseKind kind) {
    require_same_shape(a, b, "elementwise");
    if (kind == ElementwiseKind::kScale) {
        kind = ElementwiseKind::kMul;
    }
    const auto av = a.data();
    const auto bv = b.data();
    std::vector<T> out(av.size());
    switch (kind) {
        case ElementwiseKind::kAdd:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
            break;
        case ElementwiseKind::kSub:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
            break;
        default:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
            break;
    }
    Tensor<T> result(a.shape(), std::move(out));
    record_op<T>(result, {a, b}, [a, b, kind](std::span<const T> g) {
        if (a.requires_grad()) {
            auto ga = grad_buffer(a);
            if (kind == ElementwiseKind::kMul) {
                const auto bv = b.data();
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
            } else {
                for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
            }
        }
        if (b.requires_grad()) {
            auto gb = grad_buffer(b);
            if (kind == ElementwiseKind::kMul) {
                const auto av = a.data();
                for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
            } else if (kind == ElementwiseKind::kSub) {
                for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
            } else {
                for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
            }
        }
    });
    return result;
}

template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, T b, ElementwiseKind kind) {
    const auto av = a.data();
    std::vector<T> out(av.size());
    const bool multiplicative = kind == ElementwiseKind::kMul || kind == ElementwiseKind::kScale;
    for (std::size_t i = 0; i < out.size(); ++i) {
        switch (kind) {
            case ElementwiseKind::kAdd: out[i] = av[i] + b; break;
            case ElementwiseKind::kSub: out[i] = av[i] - b; break;
            default: out[i] = av[i] * b; break;
        }
    }
    Tensor<T> result(a.shape(), std::move(out));
    record_op<T>(result, {a}, [a, b, multiplicative](std::span<const T> g) {
        auto ga = grad_buffer(a);
        const T factor = multiplicative ? b : T(1);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
    });
    return result;
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        fail(ErrorCode::kShapeMismatch, "matmul expects rank-2 operands, got " + shape_str(a.shape()) + " and " +
                                            shape_str(b.shape()));
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (b.dim(0) != k) {
        fail(ErrorCode::kShapeMismatch, "matmul inner dimensions differ: " + shape_str(a.shape()) + " x " +
                                            shape_str(b.shape()));
    }
    std::vector<T> out(m * n);
    detail::gemm<T>(false, false, m, n, k, T(1), a.data().data(), b.data().data(), T(0), out.data());
    Tensor<T> result({m, n}, std::move(out));
    record_op<T>(result, {a, b}, [a, b, m, n, k](std::span<const T> g) {
        if (a.requires_grad()) {
            detail::gemm<T>(false, true, m, k, n, T(1), g.data(), b.data().data(), T(1), grad_buffer(a).data());
        }
        if (b.requires_grad()) {
            detail::gemm<T>(true, false, k, n, m, T(1), a.data().data(), g.data(), T(1), grad_buffer(b).data());
        }
    });
    return result;
}

template <typename T>
Tensor<T> bmm(const Tensor<T>& a, const Tensor<T>& b, bool trans_a, bool trans_b) {
    if (a.rank() != 3 || b.rank() != 3 || a.dim(0) != b.dim(0)) {
        fail(ErrorCode::kShapeMismatch, "bmm expects rank-3 operands with equal batch, got " + shape_str(a.shape()) +
                                            " and " + shape_str(b.shape()));
    }
    const std::size_t batch = a.dim(0);
    const std::size_t m = trans_a ? a.dim(2) : a.dim(1);
    const std::size_t k = trans_a ? a.dim(1) : a.dim(2);
    const std::size_t kb = trans_b ? b.dim(2) : b.dim(1);
    const std::size_t n = trans_b ? b.dim(1) : b.dim(2);
    if (k != kb) {
        fail(ErrorCode::kShapeMismatch, "bmm inner dimensions differ: " + shape_str(a.shape()) + " x " +
                                            shape_str(b.shape()));
    }
    std::vector<T> out(batch * m * n);
    const T* ap = a.data().data();
    const T* bp = b.data().data();
    for (std::size_t i = 0; i < batch; ++i) {
        detail::gemm<T>(trans_a, trans_b, m, n, k, T(1), ap + i * m * k, bp + i * k * n, T(0), out.data() + i * m * n);
    }
    Tensor<T> result({batch, m, n}, std::move(out));
    record_op<T>(result, {a, b}, [a, b, trans_a, trans_b, batch, m, n, k](std::span<const T> g) {
        const T* ap = a.data().data();
        const T* bp = b.data().data();
        if (a.requires_grad()) {
            T* ga = grad_buffer(a).data();
            for (std::size_t i = 0; i < batch; ++i) {
                const T* gi = g.data() + i * m * n;
                const T* bi = bp + i * k * n;
                T* gai = ga + i * m * k;
                if (!trans_a) {
                    // dA (m x k) = dC . op(B)^T
                    detail::gemm<T>(false, !trans_b, m, k, n, T(1), gi, bi, T(1), gai);
                } else {
                    // dA (k x m) = op(B) . dC^T
                    detail::gemm<T>(trans_b, true, k, m, n, T(1), bi, gi, T(1), gai);
                }
            }
        }
        if (b.requires_grad()) {
            T* gb = grad_buffer(b).data();
            for (std::size_t i = 0; i < batch; ++i) {
                const T* gi = g.data() + i * m * n;
                const T* ai = ap + i * m * k;
                T* gbi = gb + i * k * n;
                if (!trans_b) {
                    // dB (k x n) = op(A)^T . dC
                    detail::gemm<T>(!trans_a, false, k, n, m, T(1), ai, gi, T(1), gbi);
                } else {
                    // dB (n x k) = dC^T . op(A)
                    detail::gemm<T>(true, trans_a, n, k, m, T(1), gi, ai, T(1), gbi);
                }
            }
        }
    });
    return result;
}

namespace {

// Softmax over the trailing `inner` elements of each of `outer` rows.
template <typename T>
void softmax_rows(const T* x, T* y, std::size_t outer, std::size_t inner) {
    for (std::size_t r = 0; r < outer; ++r) {
        const T* xr = x + r * inner;
        T* yr = y + r * inner;
        const T mx = *std::max_element(xr, xr + inner);
        T total = 0;
        for (std::size_t j = 0; j < inner; ++j) {
            yr[j] = std::exp(xr[j] - mx);
            total += yr[j];
        }
        const T inv = T(1) / total;
        for (std::size_t j = 0; j < inner; ++j) yr[j] *= inv;
    }
}

template <typename T>
void softmax_rows_backward(const T* y, const T* g, T* gx, std::size_t outer, std::size_t inner) {
    for (std::size_t r = 0; r < outer; ++r) {
        const T* yr = y + r * inner;
        const T* gr = g + r * inner;
        T* gxr = gx + r * inner;
        T dot = 0;
        for (std::size_t j = 0; j < inner; ++j) dot += yr[j] * gr[j];
        for (std::size_t j = 0; j < inner; ++j) gxr[j] += yr[j] * (gr[j] - dot);
    }
}

}  // namespace

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, const std::vector<std::size_t>& axes) {
    if (axes.empty()) fail(ErrorCode::kInvalidArgument, "softmax: empty axis set");
    const std::size_t rank = x.rank();
    std::vector<bool> chosen(rank, false);
    for (auto ax : axes) {
        if (ax >= rank) fail(ErrorCode::kInvalidArgument, "softmax: axis " + std::to_string(ax) + " out of range for " + shape_str(x.shape()));
        if (chosen[ax]) fail(ErrorCode::kInvalidArgument, "softmax: duplicate axis " + std::to_string(ax));
        chosen[ax] = true;
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < rank; ++i)
        if (!chosen[i]) order.push_back(i);
    std::size_t inner = 1;
    for (std::size_t i = 0; i < rank; ++i)
        if (chosen[i]) {
            order.push_back(i);
            inner *= x.dim(i);
        }
    const bool identity = std::is_sorted(order.begin(), order.end());
    const std::size_t outer = x.numel() / inner;

    Shape permuted_shape(rank);
    for (std::size_t i = 0; i < rank; ++i) permuted_shape[i] = x.dim(order[i]);
    std::vector<std::size_t> inverse(rank);
    for (std::size_t i = 0; i < rank; ++i) inverse[order[i]] = i;

    std::vector<T> out(x.numel());
    if (identity) {
        softmax_rows(x.data().data(), out.data(), outer, inner);
    } else {
        std::vector<T> tmp(x.numel()), ytmp(x.numel());
        detail::permute_into(x.data().data(), x.shape(), order, tmp.data());
        softmax_rows(tmp.data(), ytmp.data(), outer, inner);
        detail::permute_into(ytmp.data(), permuted_shape, inverse, out.data());
    }
    Tensor<T> result(x.shape(), std::move(out));
    auto y = result.impl();
    record_op<T>(result, {x}, [x, y = std::weak_ptr<TensorImpl<T>>(y), identity, order, inverse, permuted_shape,
                               outer, inner](std::span<const T> g) {
        auto yv = y.lock();
        auto gx = grad_buffer(x);
        if (identity) {
            softmax_rows_backward(yv->data.data(), g.data(), gx.data(), outer, inner);
            return;
        }
        const std::size_t n = g.size();
        std::vector<T> yp(n), gp(n), gxp(n, T(0)), back(n);
        detail::permute_into(yv->data.data(), x.shape(), order, yp.data());
        detail::permute_into(g.data(), x.shape(), order, gp.data());
        softmax_rows_backward(yp.data(), gp.data(), gxp.data(), outer, inner);
        detail::permute_into(gxp.data(), permuted_shape, inverse, back.data());
        for (std::size_t i = 0; i < n; ++i) gx[i] += back[i];
    });
    return result;
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
    if (!(slope >= T(0) && slope < T(1))) fail(ErrorCode::kInvalidArgument, "leaky_relu: slope must be in [0,1)");
    const auto xv = x.data();
    std::vector<T> out(xv.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] >= T(0) ? xv[i] : slope * xv[i];
    Tensor<T> result(x.shape(), std::move(out));
    record_op<T>(result, {x}, [x, slope](std::span<const T> g) {
        auto gx = grad_buffer(x);
        const auto xv = x.data();
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += xv[i] >= T(0) ? g[i] : slope * g[i];
    });
    return result;
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
    require_same_shape(pred, target, "mse_loss");
    const auto p = pred.data();
    const auto t = target.data();
    long double acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const T d = p[i] - t[i];
        acc += static_cast<long double>(d) * d;
    }
    const std::size_t count = p.size();
    Tensor<T> result = Tensor<T>::scalar(static_cast<T>(acc / static_cast<long double>(count)));
    record_op<T>(result, {pred, target}, [pred, target, count](std::span<const T> g) {
        const auto p = pred.data();
        const auto t = target.data();
        const T c = T(2) * g[0] / static_cast<T>(count);
        if (pred.requires_grad()) {
            auto gp = grad_buffer(pred);
            for (std::size_t i = 0; i < p.size(); ++i) gp[i] += c * (p[i] - t[i]);
        }
        if (target.requires_grad()) {
            auto gt = grad_buffer(target);
            for (std::size_t i = 0; i < p.size(); ++i) gt[i] -= c * (p[i] - t[i]);
        }
    });
    return result;
}

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
    long double acc = 0;
    for (auto v : x.data()) acc += v;
    Tensor<T> result = Tensor<T>::scalar(static_cast<T>(acc));
    record_op<T>(result, {x}, [x](std::span<const T> g) {
        auto gx = grad_buffer(x);
        for (auto& v : gx) v += g[0];
    });
    return result;
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
    if (shape_numel(shape) != x.numel()) {
        fail(ErrorCode::kShapeMismatch, "reshape " + shape_str(x.shape()) + " -> " + shape_str(shape));
    }
    Tensor<T> result(std::move(shape), std::vector<T>(x.data().begin(), x.data().end()));
    record_op<T>(result, {x}, [x](std::span<const T> g) {
        auto gx = grad_buffer(x);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    });
    return result;
}

template <typename T>
Tensor<T> permute(const Tensor<T>& x, const std::vector<std::size_t>& order) {
    const std::size_t rank = x.rank();
    if (order.size() != rank) fail(ErrorCode::kInvalidArgument, "permute: order rank mismatch for " + shape_str(x.shape()));
    std::vector<bool> seen(rank, false);
    for (auto o : order) {
        if (o >= rank || seen[o]) fail(ErrorCode::kInvalidArgument, "permute: invalid axis order");
        seen[o] = true;
    }
    Shape out_shape(rank);
    for (std::size_t i = 0; i < rank; ++i) out_shape[i] = x.dim(order[i]);
    std::vector<T> out(x.numel());
    detail::permute_into(x.data().data(), x.shape(), order, out.data());
    Tensor<T> result(out_shape, std::move(out));
    std::vector<std::size_t> inverse(rank);
    for (std::size_t i = 0; i < rank; ++i) inverse[order[i]] = i;
    record_op<T>(result, {x}, [x, out_shape, inverse](std::span<const T> g) {
        std::vector<T> back(g.size());
        detail::permute_into(g.data(), out_shape, inverse, back.data());
        auto gx = grad_buffer(x);
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += back[i];
    });
    return result;
}

template <typename T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
    if (parts.empty()) fail(ErrorCode::kInvalidArgument, "concat: no inputs");
    const Shape& first = parts[0].shape();
    if (axis >= first.size()) fail(ErrorCode::kInvalidArgument, "concat: axis out of range");
    Shape out_shape = first;
    out_shape[axis] = 0;
    for (const auto& p : parts) {
        if (p.rank() != first.size()) fail(ErrorCode::kShapeMismatch, "concat: rank mismatch");
        for (std::size_t i = 0; i < first.size(); ++i) {
            if (i != axis && p.dim(i) != first[i]) {
                fail(ErrorCode::kShapeMismatch,
                     "concat: shape mismatch " + shape_str(first) + " vs " + shape_str(p.shape()));
            }
        }
        out_shape[axis] += p.dim(axis);
    }
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= first[i];
    for (std::size_t i = axis + 1; i < first.size(); ++i) inner *= first[i];
    const std::size_t out_row = out_shape[axis] * inner;
    std::vector<T> out(outer * out_row);
    std::vector<std::size_t> offsets;
    std::size_t off = 0;
    for (const auto& p : parts) {
        const std::size_t row = p.dim(axis) * inner;
        const T* src = p.data().data();
        for (std::size_t o = 0; o < outer; ++o) std::copy(src + o * row, src + (o + 1) * row, out.data() + o * out_row + off);
        offsets.push_back(off);
        off += row;
    }
    Tensor<T> result(out_shape, std::move(out));
    record_op<T>(result, parts, [parts, offsets, outer, inner, out_row, axis](std::span<const T> g) {
        for (std::size_t pi = 0; pi < parts.size(); ++pi) {
            const auto& p = parts[pi];
            if (!p.requires_grad()) continue;
            const std::size_t row = p.dim(axis) * inner;
            auto gp = grad_buffer(p);
            for (std::size_t o = 0; o < outer; ++o) {
                const T* src = g.data() + o * out_row + offsets[pi];
                T* dst = gp.data() + o * row;
                for (std::size_t j = 0; j < row; ++j) dst[j] += src[j];
            }
        }
    });
    return result;
}

template <typename T>
Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::size_t start, std::size_t length) {
    if (axis >= x.rank() || length == 0 || start + length > x.dim(axis)) {
        fail(ErrorCode::kOutOfRange, "slice [" + std::to_string(start) + ", " + std::to_string(start + length) +
                                         ") out of range on axis " + std::to_string(axis) + " of " + shape_str(x.shape()));
    }
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= x.dim(i);
    for (std::size_t i = axis + 1; i < x.rank(); ++i) inner *= x.dim(i);
    const std::size_t in_row = x.dim(axis) * inner;
    const std::size_t out_row = length * inner;
    const std::size_t off = start * inner;
    Shape out_shape = x.shape();
    out_shape[axis] = length;
    std::vector<T> out(outer * out_row);
    const T* src = x.data().data();
    for (std::size_t o = 0; o < outer; ++o)
        std::copy(src + o * in_row + off, src + o * in_row + off + out_row, out.data() + o * out_row);
    Tensor<T> result(out_shape, std::move(out));
    record_op<T>(result, {x}, [x, outer, in_row, out_row, off](std::span<const T> g) {
        auto gx = grad_buffer(x);
        for (std::size_t o = 0; o < outer; ++o) {
            T* dst = gx.data() + o * in_row + off;
            const T* s = g.data() + o * out_row;
            for (std::size_t j = 0; j < out_row; ++j) dst[j] += s[j];
        }
    });
    return result;
}

template <typename T>
Tensor<T> normalize_vectors(const Tensor<T>& x, std::size_t axis, T eps) {
    if (axis >= x.rank()) fail(ErrorCode::kInvalidArgument, "normalize_vectors: axis out of range");
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= x.dim(i);
    for (std::size_t i = axis + 1; i < x.rank(); ++i) inner *= x.dim(i);
    const std::size_t len = x.dim(axis);
    std::vector<T> norms(outer * inner, T(0));
    const T* xv = x.data().data();
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t c = 0; c < len; ++c) {
            const T* row = xv + (o * len + c) * inner;
            T* nr = norms.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) nr[i] += row[i] * row[i];
        }
    for (auto& n : norms) n = std::sqrt(n);
    std::vector<T> out(x.numel());
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t c = 0; c < len; ++c) {
            const std::size_t base = (o * len + c) * inner;
            const T* nr = norms.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) out[base + i] = nr[i] < eps ? T(0) : xv[base + i] / nr[i];
        }
    Tensor<T> result(x.shape(), std::move(out));
    auto y = std::weak_ptr<TensorImpl<T>>(result.impl());
    record_op<T>(result, {x}, [x, y, norms = std::move(norms), outer, inner, len, eps](std::span<const T> g) {
        auto yv = y.lock();
        const T* yd = yv->data.data();
        auto gx = grad_buffer(x);
        std::vector<T> dots(inner);
        for (std::size_t o = 0; o < outer; ++o) {
            std::fill(dots.begin(), dots.end(), T(0));
            for (std::size_t c = 0; c < len; ++c) {
                const std::size_t base = (o * len + c) * inner;
                for (std::size_t i = 0; i < inner; ++i) dots[i] += yd[base + i] * g[base + i];
            }
            const T* nr = norms.data() + o * inner;
            for (std::size_t c = 0; c < len; ++c) {
                const std::size_t base = (o * len + c) * inner;
                for (std::size_t i = 0; i < inner; ++i) {
                    if (nr[i] < eps) continue;
                    gx[base + i] += (g[base + i] - yd[base + i] * dots[i]) / nr[i];
                }
            }
        }
    });
    return result;
}

template <typename T>
Tensor<T> clamp(const Tensor<T>& x, T lo, T hi) {
    std::vector<T> out(x.data().begin(), x.data().end());
    for (auto& v : out) v = std::clamp(v, lo, hi);
    return Tensor<T>(x.shape(), std::move(out));
}

#define MMVP_INSTANTIATE(T)                                                                           \
    template Tensor<T> elementwise<T>(const Tensor<T>&, const Tensor<T>&, ElementwiseKind);           \
    template Tensor<T> elementwise<T>(const Tensor<T>&, T, ElementwiseKind);                          \
    template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);                                 \
    template Tensor<T> bmm<T>(const Tensor<T>&, const Tensor<T>&, bool, bool);                        \
    template Tensor<T> softmax<T>(const Tensor<T>&, const std::vector<std::size_t>&);                 \
    template Tensor<T> leaky_relu<T>(const Tensor<T>&, T);                                            \
    template Tensor<T> mse_loss<T>(const Tensor<T>&, const Tensor<T>&);                               \
    template Tensor<T> sum<T>(const Tensor<T>&);                                                      \
    template Tensor<T> reshape<T>(const Tensor<T>&, Shape);                                           \
    template Tensor<T> permute<T>(const Tensor<T>&, const std::vector<std::size_t>&);                 \
    template Tensor<T> concat<T>(const std::vector<Tensor<T>>&, std::size_t);                         \
    template Tensor<T> slice<T>(const Tensor<T>&, std::size_t, std::size_t, std::size_t);             \
    template Tensor<T> normalize_vectors<T>(const Tensor<T>&, std::size_t, T);                        \
    template Tensor<T> clamp<T>(const Tensor<T>&, T, T);

MMVP_INSTANTIATE(float)
MMVP_INSTANTIATE(double)
MMVP_INSTANTIATE(long double)

#undef MMVP_INSTANTIATE

}  // namespace mmvp
