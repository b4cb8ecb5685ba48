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

// Reference computations written directly from the definitions, sharing no
// code with the library beyond the Tensor container.

#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "mmvp/model.hpp"

namespace mmvp::oracle {

/// (n, count, hw, hw) with rows drawn from a random positive vector, normalized.
inline Tensor<double> random_stochastic(std::mt19937_64& rng, std::size_t n, std::size_t count, std::size_t hw,
                                        double sharpness = 1.0) {
    std::exponential_distribution<double> dist(1.0);
    std::vector<double> v(n * count * hw * hw);
    for (std::size_t row = 0; row < n * count * hw; ++row) {
        double s = 0;
        for (std::size_t q = 0; q < hw; ++q) {
            double e = std::pow(dist(rng), sharpness);
            v[row * hw + q] = e;
            s += e;
        }
        for (std::size_t q = 0; q < hw; ++q) v[row * hw + q] /= s;
    }
    return Tensor<double>({n, count, hw, hw}, std::move(v));
}

using Mat = std::vector<double>;  // row-major hw x hw

inline Mat matrix_at(const Tensor<double>& m, std::size_t n, std::size_t i) {
    const std::size_t hw = m.dim(2);
    const auto d = m.data().subspan(((n * m.dim(1)) + i) * hw * hw, hw * hw);
    return Mat(d.begin(), d.end());
}

inline Mat matmul_loops(const Mat& a, const Mat& b, std::size_t hw) {
    Mat c(hw * hw, 0.0);
    for (std::size_t r = 0; r < hw; ++r)
        for (std::size_t k = 0; k < hw; ++k)
            for (std::size_t q = 0; q < hw; ++q) c[r * hw + q] += a[r * hw + k] * b[k * hw + q];
    return c;
}

/// out[n, j, d, q] = sum_i sum_p A_i[p, q] x[n, i, d, p] with
/// A_i = M_i ... M_{T-1} Mhat_j, evaluated by explicit loops.
inline Tensor<double> compose_loops(const Tensor<double>& x, const Tensor<double>& chain,
                                    const Tensor<double>& future, bool average) {
    const std::size_t n = x.dim(0), t = x.dim(1), d = x.dim(2), hw = x.dim(3), tp = future.dim(1);
    std::vector<double> out(n * tp * d * hw, 0.0);
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t j = 0; j < tp; ++j)
            for (std::size_t i = 0; i < t; ++i) {
                Mat a = matrix_at(future, b, j);
                for (std::size_t k = t - 1; k-- > i;) a = matmul_loops(matrix_at(chain, b, k), a, hw);
                for (std::size_t ch = 0; ch < d; ++ch)
                    for (std::size_t p = 0; p < hw; ++p)
                        for (std::size_t q = 0; q < hw; ++q)
                            out[((b * tp + j) * d + ch) * hw + q] +=
                                a[p * hw + q] * x.at({b, i, ch, p}) / (average ? double(t) : 1.0);
            }
    return Tensor<double>({n, tp, d, hw}, std::move(out));
}

inline std::size_t conv_count(std::size_t ci, std::size_t co, std::size_t taps) { return ci * co * taps + co; }

inline std::size_t rrdb_count(std::size_t c) {
    const std::size_t g = std::max<std::size_t>(c / 2, 4);
    return 2 * (conv_count(c, g, 9) + conv_count(c + g, g, 9) + conv_count(c + 2 * g, c, 9));
}

/// Layer-by-layer parameter total of the declared architecture.
inline std::size_t expected_param_count(const ModelConfig& c) {
    std::vector<std::size_t> feature_levels;
    for (double s : c.scales) {
        std::size_t l = 0;
        while ((1.0 / s) > double(std::size_t(1) << l) + 0.5) ++l;
        feature_levels.push_back(l);
    }
    std::sort(feature_levels.begin(), feature_levels.end());
    if (c.include_image) feature_levels.erase(feature_levels.begin());
    std::size_t ml = 0;
    while ((std::size_t(1) << ml) < c.S) ++ml;
    const std::size_t top = std::max(ml, feature_levels.back());
    auto ch = [&](std::size_t l) { return c.C_img << l; };
    auto in_features = [&](std::size_t l) {
        return std::find(feature_levels.begin(), feature_levels.end(), l) != feature_levels.end();
    };

    std::size_t total = conv_count(c.C_in, c.C_img, 9);
    for (std::size_t l = 1; l <= top; ++l) total += conv_count(ch(l - 1), ch(l), 9);
    for (std::size_t l = 0; l <= top; ++l)
        if (l == ml || in_features(l)) total += rrdb_count(ch(l));

    if (c.use_filter) total += conv_count(ch(ml), c.C_img, 9) + conv_count(c.C_img, c.C_img, 9);

    const std::size_t hw = (c.H / c.S) * (c.W / c.S);
    const std::size_t k = (c.T_prime + c.T - 2) / (c.T - 1);
    total += conv_count(hw, c.C_motion, 27) + conv_count(c.C_motion, c.C_motion, 27) +
             conv_count(c.C_motion, hw * k, 27);

    const std::size_t coarsest = feature_levels.back();
    total += rrdb_count(ch(coarsest));
    for (std::size_t l = 0; l < coarsest; ++l) {
        total += conv_count(ch(l + 1), 4 * ch(l), 9) + rrdb_count(ch(l));
        std::size_t extra = in_features(l) ? ch(l) : 0;
        if (l == 0 && c.include_image) extra += c.C_in;
        if (extra) total += conv_count(ch(l) + extra, ch(l), 9);
    }
    total += conv_count(c.C_img, c.C_in, 9);
    return total;
}

}  // namespace mmvp::oracle
