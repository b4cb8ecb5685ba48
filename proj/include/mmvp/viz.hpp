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


// Motion-matrix heatmaps as binary PGM images.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmvp/data.hpp"
#include "mmvp/model.hpp"
#include "mmvp/train.hpp"

namespace mmvp::viz {

inline constexpr std::uint8_t kFlatGray = 128;
inline constexpr double kOverlayAlpha = 0.5;

struct GrayImage {
    std::size_t width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // row-major
    bool operator==(const GrayImage&) const = default;
};

/// "P5\n{W} {H}\n255\n" followed by the pixels.
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);
void write_pgm(const std::string& path, const GrayImage& image);

/// Min-max scales a (grid_h x grid_w) map to [0, 255] and upsamples it by
/// nearest neighbour to (height x width). A constant map becomes mid-gray.
GrayImage heatmap_image(std::span<const float> grid, std::size_t grid_h, std::size_t grid_w, std::size_t height,
                        std::size_t width);

/// alpha * heat + (1 - alpha) * frame, rounded.
GrayImage overlay(const GrayImage& heat, const GrayImage& frame, double alpha = kOverlayAlpha);

/// Channel mean of frame t of sequence `seq`.
GrayImage frame_image(const data::SequenceDataset& ds, std::size_t seq, std::size_t t);

struct HeatmapFiles {
    std::vector<std::string> heatmaps;  // out_dir/heatmap_<j>.pgm, j = 1..T'
    std::vector<std::string> overlays;  // out_dir/overlay/overlay_<j>.pgm
};

/// Writes row (h, w) of every normalized future matrix in `future`
/// (1, T', hw, hw). When `ground_truth` is given, frame T + j - 1 of sequence
/// `seq` under each heatmap is written as an overlay where it exists.
HeatmapFiles write_heatmaps(const Tensor<float>& future, const ModelConfig& config, std::size_t h, std::size_t w,
                            const std::string& out_dir, const data::SequenceDataset* ground_truth = nullptr,
                            std::size_t seq = 0);

/// Runs the checkpointed model on the first T frames of sequence `seq` and
/// writes the heatmaps of patch (h, w).
HeatmapFiles dump_heatmaps(const train::Checkpoint& ckpt, const data::SequenceDataset& ds, std::size_t seq,
                           std::size_t h, std::size_t w, const std::string& out_dir);

}  // namespace mmvp::viz
