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

// 2D and 3D convolution share one volumetric im2col path; a 2D convolution is
// a 3D one with unit depth and no depth padding.

#include <algorithm>
#include <cstring>

#include "grad_util.hpp"
#include "mmvp/ops.hpp"

namespace mmvp {

using detail::grad_buffer;

namespace {

struct ConvGeom {
    std::size_t batch, c_in, c_out;
    std::size_t d, h, w;
    std::size_t kd, kh, kw;
    std::size_t stride;
    std::size_t pd, ph, pw;
    std::size_t od, oh, ow;

    std::size_t k() const { return c_in * kd * kh * kw; }
    std::size_t in_plane() const { return d * h * w; }
    std::size_t out_plane() const { return od * oh * ow; }
};

std::size_t out_extent(std::size_t in, std::size_t k, std::size_t pad, std::size_t stride, const char* op,
                       const char* axis) {
    // Floor convention: trailing input rows the last window cannot reach are
    // ignored, so a 3x3/stride-2/pad-1 conv halves even extents.
    const std::size_t padded = in + 2 * pad;
    if (padded < k) {
        fail(ErrorCode::kShapeMismatch, std::string(op) + ": no valid output size along " + axis + " (input " +
                                            std::to_string(in) + ", kernel " + std::to_string(k) + ", pad " +
                                            std::to_string(pad) + ", stride " + std::to_string(stride) + ")");
    }
    return (padded - k) / stride + 1;
}

// Valid output index range [lo, hi) for which in = o*stride - pad + k lies in [0, n).
inline void valid_range(std::size_t n, std::size_t out, std::size_t stride, std::size_t pad, std::size_t k,
                        std::size_t& lo, std::size_t& hi) {
    // o*stride + k >= pad  and  o*stride + k - pad < n
    lo = k >= pad ? 0 : (pad - k + stride - 1) / stride;
    if (n + pad <= k) {
        hi = 0;
    } else {
        hi = std::min(out, (n + pad - k - 1) / stride + 1);
    }
    if (lo > hi) lo = hi;
}

// Writes the column block of one image: rows (c,kz,ky,kx), columns (oz,oy,ox)
// at offset `col_offset` inside rows of length `ld`.
template <typename T>
void im2col(const T* img, const ConvGeom& g, T* col, std::size_t ld, std::size_t col_offset) {
    const std::size_t ow = g.ow, oh = g.oh, od = g.od;
    std::size_t row = 0;
    for (std::size_t c = 0; c < g.c_in; ++c) {
        const T* plane = img + c * g.in_plane();
        for (std::size_t kz = 0; kz < g.kd; ++kz) {
            std::size_t z_lo, z_hi;
            valid_range(g.d, od, g.stride, g.pd, kz, z_lo, z_hi);
            for (std::size_t ky = 0; ky < g.kh; ++ky) {
                std::size_t y_lo, y_hi;
                valid_range(g.h, oh, g.stride, g.ph, ky, y_lo, y_hi);
                for (std::size_t kx = 0; kx < g.kw; ++kx, ++row) {
                    std::size_t x_lo, x_hi;
                    valid_range(g.w, ow, g.stride, g.pw, kx, x_lo, x_hi);
                    T* dst = col + row * ld + col_offset;
                    std::fill(dst, dst + g.out_plane(), T(0));
                    for (std::size_t oz = z_lo; oz < z_hi; ++oz) {
                        const std::size_t iz = oz * g.stride + kz - g.pd;
                        for (std::size_t oy = y_lo; oy < y_hi; ++oy) {
                            const std::size_t iy = oy * g.stride + ky - g.ph;
                            const T* src = plane + (iz * g.h + iy) * g.w;
                            T* d = dst + (oz * oh + oy) * ow;
                            if (g.stride == 1) {
                                const std::size_t ix0 = x_lo + kx - g.pw;
                                std::memcpy(d + x_lo, src + ix0, (x_hi - x_lo) * sizeof(T));
                            } else {
                                for (std::size_t ox = x_lo; ox < x_hi; ++ox) d[ox] = src[ox * g.stride + kx - g.pw];
                            }
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im(const T* col, const ConvGeom& g, std::size_t ld, std::size_t col_offset, T* img) {
    const std::size_t ow = g.ow, oh = g.oh, od = g.od;
    std::size_t row = 0;
    for (std::size_t c = 0; c < g.c_in; ++c) {
        T* plane = img + c * g.in_plane();
        for (std::size_t kz = 0; kz < g.kd; ++kz) {
            std::size_t z_lo, z_hi;
            valid_range(g.d, od, g.stride, g.pd, kz, z_lo, z_hi);
            for (std::size_t ky = 0; ky < g.kh; ++ky) {
                std::size_t y_lo, y_hi;
                valid_range(g.h, oh, g.stride, g.ph, ky, y_lo, y_hi);
                for (std::size_t kx = 0; kx < g.kw; ++kx, ++row) {
                    std::size_t x_lo, x_hi;
                    valid_range(g.w, ow, g.stride, g.pw, kx, x_lo, x_hi);
                    const T* src_row = col + row * ld + col_offset;
                    for (std::size_t oz = z_lo; oz < z_hi; ++oz) {
                        const std::size_t iz = oz * g.stride + kz - g.pd;
                        for (std::size_t oy = y_lo; oy < y_hi; ++oy) {
                            const std::size_t iy = oy * g.stride + ky - g.ph;
                            T* d = plane + (iz * g.h + iy) * g.w;
                            const T* s = src_row + (oz * oh + oy) * ow;
                            for (std::size_t ox = x_lo; ox < x_hi; ++ox) d[ox * g.stride + kx - g.pw] += s[ox];
                        }
                    }
                }
            }
        }
    }
}

// Images per GEMM: enough columns to keep the kernel busy, bounded scratch.
std::size_t chunk_size(const ConvGeom& g) {
    constexpr std::size_t kTargetCols = 2048;
    constexpr std::size_t kMaxScratch = std::size_t(1) << 24;
    std::size_t nb = std::max<std::size_t>(1, kTargetCols / std::max<std::size_t>(1, g.out_plane()));
    while (nb > 1 && nb * g.out_plane() * g.k() > kMaxScratch) --nb;
    return std::min(nb, g.batch);
}

template <typename T>
Tensor<T> conv_forward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias, const ConvGeom& g,
                       const Shape& out_shape) {
    const std::size_t K = g.k();
    const std::size_t P = g.out_plane();
    const std::size_t nb_max = chunk_size(g);
    const T* xp = x.data().data();
    const T* wp = weight.data().data();
    std::vector<T> out(g.batch * g.c_out * P);
    std::vector<T> col(K * nb_max * P);
    std::vector<T> tmp(nb_max > 1 ? g.c_out * nb_max * P : 0);

    for (std::size_t n0 = 0; n0 < g.batch; n0 += nb_max) {
        const std::size_t nb = std::min(nb_max, g.batch - n0);
        const std::size_t cols = nb * P;
        for (std::size_t i = 0; i < nb; ++i) im2col(xp + (n0 + i) * g.c_in * g.in_plane(), g, col.data(), cols, i * P);
        if (nb == 1) {
            detail::gemm<T>(false, false, g.c_out, P, K, T(1), wp, col.data(), T(0), out.data() + n0 * g.c_out * P);
        } else {
            detail::gemm<T>(false, false, g.c_out, cols, K, T(1), wp, col.data(), T(0), tmp.data());
            for (std::size_t i = 0; i < nb; ++i)
                for (std::size_t co = 0; co < g.c_out; ++co)
                    std::memcpy(out.data() + ((n0 + i) * g.c_out + co) * P, tmp.data() + co * cols + i * P,
                                P * sizeof(T));
        }
    }
    if (bias.defined()) {
        const T* bp = bias.data().data();
        for (std::size_t n = 0; n < g.batch; ++n)
            for (std::size_t co = 0; co < g.c_out; ++co) {
                T* o = out.data() + (n * g.c_out + co) * P;
                for (std::size_t p = 0; p < P; ++p) o[p] += bp[co];
            }
    }

    Tensor<T> result(out_shape, std::move(out));
    std::vector<Tensor<T>> inputs{x, weight};
    if (bias.defined()) inputs.push_back(bias);
    record_op<T>(result, inputs, [x, weight, bias, g](std::span<const T> grad) {
        const std::size_t K = g.k();
        const std::size_t P = g.out_plane();
        const std::size_t nb_max = chunk_size(g);
        const T* xp = x.data().data();
        const T* wp = weight.data().data();
        const bool need_x = x.requires_grad();
        const bool need_w = weight.requires_grad();
        if (bias.defined() && bias.requires_grad()) {
            auto gb = grad_buffer(bias);
            for (std::size_t n = 0; n < g.batch; ++n)
                for (std::size_t co = 0; co < g.c_out; ++co) {
                    const T* go = grad.data() + (n * g.c_out + co) * P;
                    T acc = 0;
                    for (std::size_t p = 0; p < P; ++p) acc += go[p];
                    gb[co] += acc;
                }
        }
        if (!need_x && !need_w) return;
        T* gw = need_w ? grad_buffer(weight).data() : nullptr;
        T* gx = need_x ? grad_buffer(x).data() : nullptr;
        std::vector<T> col(K * nb_max * P);
        std::vector<T> gout(nb_max > 1 ? g.c_out * nb_max * P : 0);
        for (std::size_t n0 = 0; n0 < g.batch; n0 += nb_max) {
            const std::size_t nb = std::min(nb_max, g.batch - n0);
            const std::size_t cols = nb * P;
            const T* go;
            if (nb == 1) {
                go = grad.data() + n0 * g.c_out * P;
            } else {
                for (std::size_t i = 0; i < nb; ++i)
                    for (std::size_t co = 0; co < g.c_out; ++co)
                        std::memcpy(gout.data() + co * cols + i * P, grad.data() + ((n0 + i) * g.c_out + co) * P,
                                    P * sizeof(T));
                go = gout.data();
            }
            if (need_w) {
                for (std::size_t i = 0; i < nb; ++i)
                    im2col(xp + (n0 + i) * g.c_in * g.in_plane(), g, col.data(), cols, i * P);
                detail::gemm<T>(false, true, g.c_out, K, cols, T(1), go, col.data(), T(1), gw);
            }
            if (need_x) {
                detail::gemm<T>(true, false, K, cols, g.c_out, T(1), wp, go, T(0), col.data());
                for (std::size_t i = 0; i < nb; ++i)
                    col2im(col.data(), g, cols, i * P, gx + (n0 + i) * g.c_in * g.in_plane());
            }
        }
    });
    return result;
}

template <typename T>
void check_bias(const Tensor<T>& bias, std::size_t c_out, const char* op) {
    if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != c_out)) {
        fail(ErrorCode::kShapeMismatch, std::string(op) + ": bias shape " + shape_str(bias.shape()) +
                                            " does not match " + std::to_string(c_out) + " output channels");
    }
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias, std::size_t stride,
                 std::size_t padding) {
    if (x.rank() != 4 || weight.rank() != 4) {
        fail(ErrorCode::kShapeMismatch, "conv2d expects (N,C,H,W) input and (Co,Ci,kH,kW) weight, got " +
                                            shape_str(x.shape()) + " and " + shape_str(weight.shape()));
    }
    if (weight.dim(1) != x.dim(1)) {
        fail(ErrorCode::kShapeMismatch, "conv2d: input channels " + std::to_string(x.dim(1)) +
                                            " do not match weight " + shape_str(weight.shape()));
    }
    if (weight.dim(2) % 2 == 0 || weight.dim(3) % 2 == 0) fail(ErrorCode::kInvalidArgument, "conv2d: kernel sizes must be odd");
    if (stride == 0) fail(ErrorCode::kInvalidArgument, "conv2d: stride must be positive");
    check_bias(bias, weight.dim(0), "conv2d");
    ConvGeom g{};
    g.batch = x.dim(0);
    g.c_in = x.dim(1);
    g.c_out = weight.dim(0);
    g.d = 1;
    g.h = x.dim(2);
    g.w = x.dim(3);
    g.kd = 1;
    g.kh = weight.dim(2);
    g.kw = weight.dim(3);
    g.stride = stride;
    g.pd = 0;
    g.ph = padding;
    g.pw = padding;
    g.od = 1;
    g.oh = out_extent(g.h, g.kh, padding, stride, "conv2d", "height");
    g.ow = out_extent(g.w, g.kw, padding, stride, "conv2d", "width");
    return conv_forward(x, weight, bias, g, {g.batch, g.c_out, g.oh, g.ow});
}

template <typename T>
Tensor<T> conv3d(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias, std::size_t stride,
                 std::size_t padding) {
    if (x.rank() != 5 || weight.rank() != 5) {
        fail(ErrorCode::kShapeMismatch, "conv3d expects (N,C,D,H,W) input and (Co,Ci,kD,kH,kW) weight, got " +
                                            shape_str(x.shape()) + " and " + shape_str(weight.shape()));
    }
    if (weight.dim(1) != x.dim(1)) {
        fail(ErrorCode::kShapeMismatch, "conv3d: input channels " + std::to_string(x.dim(1)) +
                                            " do not match weight " + shape_str(weight.shape()));
    }
    if (weight.dim(2) % 2 == 0 || weight.dim(3) % 2 == 0 || weight.dim(4) % 2 == 0) {
        fail(ErrorCode::kInvalidArgument, "conv3d: kernel sizes must be odd");
    }
    if (stride == 0) fail(ErrorCode::kInvalidArgument, "conv3d: stride must be positive");
    check_bias(bias, weight.dim(0), "conv3d");
    ConvGeom g{};
    g.batch = x.dim(0);
    g.c_in = x.dim(1);
    g.c_out = weight.dim(0);
    g.d = x.dim(2);
    g.h = x.dim(3);
    g.w = x.dim(4);
    g.kd = weight.dim(2);
    g.kh = weight.dim(3);
    g.kw = weight.dim(4);
    g.stride = stride;
    g.pd = padding;
    g.ph = padding;
    g.pw = padding;
    g.od = out_extent(g.d, g.kd, padding, stride, "conv3d", "depth");
    g.oh = out_extent(g.h, g.kh, padding, stride, "conv3d", "height");
    g.ow = out_extent(g.w, g.kw, padding, stride, "conv3d", "width");
    return conv_forward(x, weight, bias, g, {g.batch, g.c_out, g.od, g.oh, g.ow});
}

template Tensor<float> conv2d<float>(const Tensor<float>&, const Tensor<float>&, const Tensor<float>&, std::size_t,
                                     std::size_t);
template Tensor<double> conv2d<double>(const Tensor<double>&, const Tensor<double>&, const Tensor<double>&,
                                       std::size_t, std::size_t);
template Tensor<float> conv3d<float>(const Tensor<float>&, const Tensor<float>&, const Tensor<float>&, std::size_t,
                                     std::size_t);
template Tensor<double> conv3d<double>(const Tensor<double>&, const Tensor<double>&, const Tensor<double>&,
                                       std::size_t, std::size_t);
template Tensor<long double> conv2d<long double>(const Tensor<long double>&, const Tensor<long double>&,
                                                 const Tensor<long double>&, std::size_t, std::size_t);
template Tensor<long double> conv3d<long double>(const Tensor<long double>&, const Tensor<long double>&,
                                                 const Tensor<long double>&, std::size_t, std::size_t);

}  // namespace mmvp
