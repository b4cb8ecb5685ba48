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


// Direct-formula image metrics on plain row-major planes. Written from the
// definitions with no library helpers, so they serve as independent oracles.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mmvp::oracle {

using Plane = std::vector<double>;

inline double psnr_direct(const Plane& a, const Plane& b, double range = 1.0) {
    double se = 0;
    for (std::size_t i = 0; i < a.size(); ++i) se += std::pow(a[i] - b[i], 2);
    const double mse = se / double(a.size());
    return mse < 1e-10 ? 100.0 : 20.0 * std::log10(range) - 10.0 * std::log10(mse);
}

/// Every 7x7 window fully inside the image, moments by explicit two-pass sums.
inline double ssim_direct(const Plane& a, const Plane& b, std::size_t h, std::size_t w, double range = 1.0) {
    const int k = 7;
    const double c1 = std::pow(0.01 * range, 2), c2 = std::pow(0.03 * range, 2);
    double total = 0;
    int windows = 0;
    for (int y0 = 0; y0 + k <= int(h); ++y0)
        for (int x0 = 0; x0 + k <= int(w); ++x0) {
            double ma = 0, mb = 0;
            for (int dy = 0; dy < k; ++dy)
                for (int dx = 0; dx < k; ++dx) {
                    ma += a[(y0 + dy) * w + x0 + dx];
                    mb += b[(y0 + dy) * w + x0 + dx];
                }
            ma /= k * k;
            mb /= k * k;
            double va = 0, vb = 0, cab = 0;
            for (int dy = 0; dy < k; ++dy)
                for (int dx = 0; dx < k; ++dx) {
                    const double da = a[(y0 + dy) * w + x0 + dx] - ma;
                    const double db = b[(y0 + dy) * w + x0 + dx] - mb;
                    va += da * da;
                    vb += db * db;
                    cab += da * db;
                }
            va /= k * k;
            vb /= k * k;
            cab /= k * k;
            const double lum = (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
            const double cs = (2 * cab + c2) / (va + vb + c2);
            total += lum * cs;
            ++windows;
        }
    return total / windows;
}

/// frames[f] holds one frame; mean over frames of its squared-error sum.
inline double mse_sum_direct(const std::vector<Plane>& pred, const std::vector<Plane>& gt) {
    double total = 0;
    for (std::size_t f = 0; f < pred.size(); ++f) {
        double s = 0;
        for (std::size_t i = 0; i < pred[f].size(); ++i) s += (pred[f][i] - gt[f][i]) * (pred[f][i] - gt[f][i]);
        total += s;
    }
    return total / double(pred.size());
}

}  // namespace mmvp::oracle
