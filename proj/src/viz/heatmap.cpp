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


#include "mmvp/viz.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmvp/error.hpp"

namespace mmvp::viz {

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
    if (image.pixels.size() != image.width * image.height) {
        fail(ErrorCode::kShapeMismatch, "pgm: pixel count does not match " + std::to_string(image.width) + "x" +
                                           std::to_string(image.height));
    }
    const std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels.begin(), image.pixels.end());
    return out;
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
    const std::string text(bytes.begin(), bytes.begin() + std::min<std::size_t>(bytes.size(), 64));
    std::istringstream in(text);
    std::string magic;
    std::size_t w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || !in || maxval != 255) fail(ErrorCode::kBadMagic, "not an 8-bit binary PGM");
    const auto offset = static_cast<std::size_t>(in.tellg()) + 1;  // one whitespace byte after maxval
    if (bytes.size() != offset + w * h) fail(ErrorCode::kTruncatedPayload, "pgm payload size does not match header");
    return {w, h, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end())};
}

void write_pgm(const std::string& path, const GrayImage& image) {
    const auto bytes = encode_pgm(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, "failed writing " + path);
}

GrayImage heatmap_image(std::span<const float> grid, std::size_t grid_h, std::size_t grid_w, std::size_t height,
                        std::size_t width) {
    if (grid.size() != grid_h * grid_w || grid.empty()) fail(ErrorCode::kShapeMismatch, "heatmap: grid size mismatch");
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    const double range = double(*hi) - double(*lo);
    std::vector<std::uint8_t> cells(grid.size(), kFlatGray);
    if (range > 0) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            cells[i] = static_cast<std::uint8_t>(std::lround((double(grid[i]) - double(*lo)) / range * 255.0));
        }
    }
    GrayImage img{width, height, std::vector<std::uint8_t>(width * height)};
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) img.pixels[y * width + x] = cells[(y * grid_h / height) * grid_w + x * grid_w / width];
    return img;
}

GrayImage overlay(const GrayImage& heat, const GrayImage& frame, double alpha) {
    if (heat.width != frame.width || heat.height != frame.height) {
        fail(ErrorCode::kShapeMismatch, "overlay: heatmap and frame sizes differ");
    }
    GrayImage out = heat;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        out.pixels[i] = static_cast<std::uint8_t>(std::lround(alpha * heat.pixels[i] + (1 - alpha) * frame.pixels[i]));
    }
    return out;
}

GrayImage frame_image(const data::SequenceDataset& ds, std::size_t seq, std::size_t t) {
    const auto f = ds.frame(seq, t);
    const std::size_t plane = std::size_t(ds.height) * ds.width;
    GrayImage img{ds.width, ds.height, std::vector<std::uint8_t>(plane)};
    for (std::size_t i = 0; i < plane; ++i) {
        unsigned sum = 0;
        for (std::size_t c = 0; c < ds.channels; ++c) sum += f[c * plane + i];
        img.pixels[i] = static_cast<std::uint8_t>((sum + ds.channels / 2) / ds.channels);
    }
    return img;
}

HeatmapFiles write_heatmaps(const Tensor<float>& future, const ModelConfig& config, std::size_t h, std::size_t w,
                            const std::string& out_dir, const data::SequenceDataset* ground_truth, std::size_t seq) {
    const std::size_t gh = config.grid_h(), gw = config.grid_w(), hw = gh * gw;
    if (h >= gh || w >= gw) {
        fail(ErrorCode::kOutOfRange, "patch (" + std::to_string(h) + "," + std::to_string(w) + ") is outside the " +
                                         std::to_string(gh) + "x" + std::to_string(gw) + " grid");
    }
    if (future.rank() != 4 || future.dim(0) != 1 || future.dim(2) != hw || future.dim(3) != hw) {
        fail(ErrorCode::kShapeMismatch, "heatmaps need (1, T', hw, hw) matrices, got " + shape_str(future.shape()));
    }
    std::filesystem::create_directories(out_dir);
    HeatmapFiles files;
    const std::size_t row = h * gw + w, tp = future.dim(1);
    for (std::size_t j = 0; j < tp; ++j) {
        const auto values = future.data().subspan((j * hw + row) * hw, hw);
        const GrayImage heat = heatmap_image(values, gh, gw, config.H, config.W);
        const std::string name = std::to_string(j + 1) + ".pgm";
        files.heatmaps.push_back((std::filesystem::path(out_dir) / ("heatmap_" + name)).string());
        write_pgm(files.heatmaps.back(), heat);
        if (ground_truth && config.T + j < ground_truth->seq_len) {
            const auto dir = std::filesystem::path(out_dir) / "overlay";
            std::filesystem::create_directories(dir);
            files.overlays.push_back((dir / ("overlay_" + name)).string());
            write_pgm(files.overlays.back(), overlay(heat, frame_image(*ground_truth, seq, config.T + j)));
        }
    }
    return files;
}

HeatmapFiles dump_heatmaps(const train::Checkpoint& ckpt, const data::SequenceDataset& ds, std::size_t seq,
                           std::size_t h, std::size_t w, const std::string& out_dir) {
    const Model<float> model = train::model_from_checkpoint(ckpt);
    const ModelConfig& config = model.config();
    if (seq >= ds.num_sequences) {
        fail(ErrorCode::kOutOfRange, "sequence " + std::to_string(seq) + " is out of range for " +
                                         std::to_string(ds.num_sequences) + " sequences");
    }
    if (ds.seq_len < config.T || ds.height != config.H || ds.width != config.W || ds.channels != config.C_in) {
        fail(ErrorCode::kShapeMismatch, "dataset geometry does not match the checkpointed model");
    }
    if (h >= config.grid_h() || w >= config.grid_w()) {
        fail(ErrorCode::kOutOfRange, "patch (" + std::to_string(h) + "," + std::to_string(w) + ") is outside the " +
                                         std::to_string(config.grid_h()) + "x" + std::to_string(config.grid_w()) +
                                         " grid");
    }
    Tensor<float> future;
    {
        NoGradScope<float> no_grad;
        future = model.forward(ds.clip<float>({seq}, 0, config.T), Tensor<float>()).future.values;
    }
    return write_heatmaps(future, config, h, w, out_dir, &ds, seq);
}

}  // namespace mmvp::viz
