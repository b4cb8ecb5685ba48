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

#include <Eigen/Core>

#include "mmvp/ops.hpp"

namespace mmvp::detail {

template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          const T* b, T beta, T* c) {
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using CMap = Eigen::Map<const Mat>;
    const auto M = static_cast<Eigen::Index>(m);
    const auto N = static_cast<Eigen::Index>(n);
    const auto K = static_cast<Eigen::Index>(k);

    Eigen::Map<Mat> cm(c, M, N);
    if (beta == T(0)) {
        cm.setZero();
    } else if (beta != T(1)) {
        cm *= beta;
    }
    if (m == 0 || n == 0 || k == 0) return;

    if (!trans_a && !trans_b) {
        cm.noalias() += alpha * (CMap(a, M, K) * CMap(b, K, N));
    } else if (trans_a && !trans_b) {
        cm.noalias() += alpha * (CMap(a, K, M).transpose() * CMap(b, K, N));
    } else if (!trans_a && trans_b) {
        cm.noalias() += alpha * (CMap(a, M, K) * CMap(b, N, K).transpose());
    } else {
        cm.noalias() += alpha * (CMap(a, K, M).transpose() * CMap(b, N, K).transpose());
    }
}

template void gemm<float>(bool, bool, std::size_t, std::size_t, std::size_t, float, const float*, const float*,
                          float, float*);
template void gemm<double>(bool, bool, std::size_t, std::size_t, std::size_t, double, const double*,
                           const double*, double, double*);
template void gemm<long double>(bool, bool, std::size_t, std::size_t, std::size_t, long double, const long double*,
                                const long double*, long double, long double*);

}  // namespace mmvp::detail
