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


#include "mmvp/metrics.hpp"

#include <cmath>
#include <vector>

#include "mmvp/error.hpp"

namespace mmvp::metrics {

namespace {

void check_same(const Tensor<double>& a, const Tensor<double>& b, const char* what) {
    if (!a.defined() || !b.defined()) fail(ErrorCode::kInvalidArgument, std::string(what) + ": undefined image");
    if (a.shape() != b.shape()) {
        fail(ErrorCode::kShapeMismatch,
             std::string(what) + ": shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()) + " differ");
    }
    if (a.numel() == 0) fail(ErrorCode::kInvalidArgument, std::string(what) + ": empty image");
}

// Horizontal then vertical box sums of width kSsimWindow; output is the valid
// region, (h - 6) x (w - 6).
void box_sum(const std::vector<double>& in, std::size_t h, std::size_t w, std::vector<double>& rows,
             std::vector<double>& out) {
    const std::size_t k = kSsimWindow, ow = w - k + 1, oh = h - k + 1;
    rows.assign(h * ow, 0.0);
    for (std::size_t y = 0; y < h; ++y) {
        const double* src = in.data() + y * w;
        double* dst = rows.data() + y * ow;
        for (std::size_t x = 0; x < ow; ++x) {
            double s = 0;
            for (std::size_t d = 0; d < k; ++d) s += src[x + d];
            dst[x] = s;
        }
    }
    out.assign(oh * ow, 0.0);
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t d = 0; d < k; ++d) {
            const double* src = rows.data() + (y + d) * ow;
            double* dst = out.data() + y * ow;
            for (std::size_t x = 0; x < ow; ++x) dst[x] += src[x];
        }
}

double ssim_plane(const double* a, const double* b, std::size_t h, std::size_t w, double c1, double c2) {
    const std::size_t n = h * w;
    std::vector<double> x(a, a + n), y(b, b + n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    std::vector<double> rows, sx, sy, sxx, syy, sxy;
    box_sum(x, h, w, rows, sx);
    box_sum(y, h, w, rows, sy);
    box_sum(xx, h, w, rows, sxx);
    box_sum(yy, h, w, rows, syy);
    box_sum(xy, h, w, rows, sxy);
    const double inv = 1.0 / double(kSsimWindow * kSsimWindow);
    double total = 0;
    for (std::size_t i = 0; i < sx.size(); ++i) {
        const double mx = sx[i] * inv, my = sy[i] * inv;
        const double vx = sxx[i] * inv - mx * mx;
        const double vy = syy[i] * inv - my * my;
        const double cov = sxy[i] * inv - mx * my;
        total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    return total / double(sx.size());
}

}  // namespace

double psnr(const Tensor<double>& pred, const Tensor<double>& gt, double data_range) {
    check_same(pred, gt, "psnr");
    const auto p = pred.data(), g = gt.data();
    double se = 0;
    for (std::size_t i = 0; i < p.size(); ++i) se += (p[i] - g[i]) * (p[i] - g[i]);
    const double mse = se / double(p.size());
    if (mse < kPsnrMinMse) return kPsnrCap;
    return 10.0 * std::log10(data_range * data_range / mse);
}

double ssim(const Tensor<double>& pred, const Tensor<double>& gt, double data_range) {
    check_same(pred, gt, "ssim");
    if (pred.rank() < 2) fail(ErrorCode::kShapeMismatch, "ssim: images need (height, width) axes");
    const std::size_t h = pred.dim(pred.rank() - 2), w = pred.dim(pred.rank() - 1);
    if (h < kSsimWindow || w < kSsimWindow) {
        fail(ErrorCode::kInvalidArgument, "ssim: image " + std::to_string(h) + "x" + std::to_string(w) +
                                              " is smaller than the 7x7 window");
    }
    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);
    const std::size_t planes = pred.numel() / (h * w);
    double total = 0;
    for (std::size_t c = 0; c < planes; ++c) {
        total += ssim_plane(pred.data().data() + c * h * w, gt.data().data() + c * h * w, h, w, c1, c2);
    }
    return total / double(planes);
}

double mse_sum(const Tensor<double>& pred, const Tensor<double>& gt) {
    check_same(pred, gt, "mse_sum");
    if (pred.rank() < 2) fail(ErrorCode::kShapeMismatch, "mse_sum: expected (frames, ...) with per-frame pixels");
    const std::size_t frames = pred.dim(0), per = pred.numel() / frames;
    const auto p = pred.data(), g = gt.data();
    double total = 0;
    for (std::size_t f = 0; f < frames; ++f) {
        double s = 0;
        for (std::size_t i = f * per; i < (f + 1) * per; ++i) s += (p[i] - g[i]) * (p[i] - g[i]);
        total += s;
    }
    return total / double(frames);
}

const char* difficulty_name(Difficulty d) {
    switch (d) {
        case Difficulty::kEasy: return "easy";
        case Difficulty::kIntermediate: return "intermediate";
        case Difficulty::kHard: return "hard";
    }
    return "unknown";
}

Difficulty classify(double s) {
    if (s >= kEasyThreshold) return Difficulty::kEasy;
    if (s >= kHardThreshold) return Difficulty::kIntermediate;
    return Difficulty::kHard;
}

Difficulty split_difficulty(const Tensor<double>& last_observed, const Tensor<double>& first_future) {
    return classify(ssim(last_observed, first_future));
}

}  // namespace mmvp::metrics
