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


// Image-quality metrics and the difficulty-subset evaluation protocol.
//
// Images are tensors whose last two axes are (height, width); any leading axes
// index channels or frames. Intensities are expected in [0, data_range].

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mmvp/data.hpp"
#include "mmvp/tensor.hpp"

namespace mmvp::metrics {

inline constexpr double kPsnrCap = 100.0;
inline constexpr double kPsnrMinMse = 1e-10;
inline constexpr std::size_t kSsimWindow = 7;
inline constexpr double kEasyThreshold = 0.9;
inline constexpr double kHardThreshold = 0.6;

/// 10 log10(L^2 / MSE) over all elements, or kPsnrCap when MSE < 1e-10.
double psnr(const Tensor<double>& pred, const Tensor<double>& gt, double data_range = 1.0);

/// Mean SSIM over all valid 7x7 windows with uniform weights and population
/// moments, averaged over the leading (channel) axes.
double ssim(const Tensor<double>& pred, const Tensor<double>& gt, double data_range = 1.0);

/// Axis 0 indexes frames: mean over frames of the per-frame sum of squared
/// error.
double mse_sum(const Tensor<double>& pred, const Tensor<double>& gt);

enum class Difficulty { kEasy = 0, kIntermediate = 1, kHard = 2 };
inline constexpr std::size_t kDifficultyCount = 3;

const char* difficulty_name(Difficulty d);

/// easy iff s >= 0.9, hard iff s < 0.6 (NaN included), otherwise intermediate.
Difficulty classify(double s);

/// Label from the SSIM between the last observed and first future frame.
Difficulty split_difficulty(const Tensor<double>& last_observed, const Tensor<double>& first_future);

struct SequenceScore {
    double psnr = 0;  // mean of per-frame PSNR
    double ssim = 0;  // mean of per-frame SSIM
    double mse_sum = 0;
    double split_ssim = 0;
    Difficulty subset = Difficulty::kIntermediate;
};

struct Aggregate {
    double psnr = 0, ssim = 0, mse_sum = 0;
    std::size_t count = 0;
};

struct MetricReport {
    std::vector<SequenceScore> sequences;
    Aggregate full;
    std::array<Aggregate, kDifficultyCount> subsets{};

    const Aggregate& subset(Difficulty d) const { return subsets[static_cast<std::size_t>(d)]; }
};

/// Scores one sequence. pred and gt are (T', C, H, W); last_observed is the
/// (C, H, W) frame preceding gt.
SequenceScore score_sequence(const Tensor<double>& pred, const Tensor<double>& gt,
                             const Tensor<double>& last_observed);

/// Compensated means over all sequences and over each subset.
MetricReport aggregate(std::vector<SequenceScore> sequences);

/// Compares frames [t_obs, pred.seq_len) of the two datasets. gt may hold
/// longer sequences; the subset split uses gt frames t_obs - 1 and t_obs.
MetricReport score_datasets(const data::SequenceDataset& pred, const data::SequenceDataset& gt, std::size_t t_obs);

/// Maps observed frames (T, C, H, W) to T' predicted frames (T', C, H, W).
/// Called concurrently when more than one thread is used.
using Predictor = std::function<Tensor<float>(const Tensor<float>& observed)>;

struct Evaluation {
    MetricReport model;
    MetricReport baseline;  // repeat the last observed frame
    std::size_t t_obs = 0, t_future = 0;
};

/// Feeds the first t_obs frames of every sequence to `predict` and scores the
/// next t_future frames, alongside the repeat-last-frame baseline. threads = 0
/// picks the hardware concurrency.
Evaluation evaluate(const data::SequenceDataset& dataset, std::size_t t_obs, std::size_t t_future,
                    const Predictor& predict, std::size_t threads = 1);

/// JSON document with keys psnr, ssim, mse_sum, subset and counts.
std::string report_json(const MetricReport& report, std::size_t t_obs);
std::string evaluation_json(const Evaluation& evaluation);

}  // namespace mmvp::metrics
