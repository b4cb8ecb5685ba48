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

// Bouncing-sprite sequence generator and the packed dataset file.
//
// File layout (little-endian):
//   "MMVP" | version u32 | num_sequences u32 | seq_len u32 | height u32 |
//   width u32 | channels u32 | dtype u8 | payload
// with payload bytes ordered [sequence][frame][channel][y][x], value/255 being
// the intensity.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmvp/tensor.hpp"

namespace mmvp::data {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint8_t kDtypeU8 = 0;
inline constexpr std::size_t kHeaderBytes = 29;
inline constexpr std::size_t kGlyphSize = 16;
inline constexpr std::size_t kGlyphCount = 10;

struct SequenceDataset {
    std::uint32_t num_sequences = 0;
    std::uint32_t seq_len = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t channels = 1;
    std::vector<std::uint8_t> pixels;

    std::size_t frame_size() const { return std::size_t(channels) * height * width; }
    std::size_t sequence_size() const { return frame_size() * seq_len; }

    /// Raw bytes of one frame.
    std::span<const std::uint8_t> frame(std::size_t seq, std::size_t t) const;
    std::span<std::uint8_t> mutable_frame(std::size_t seq, std::size_t t);

    /// Frames [t0, t0 + count) of the given sequences as floats in [0, 1],
    /// shaped (batch, count, channels, height, width).
    template <typename T>
    Tensor<T> clip(const std::vector<std::size_t>& seqs, std::size_t t0, std::size_t count) const;

    /// Empty dataset with the given geometry and zeroed pixels.
    static SequenceDataset allocate(std::uint32_t num_sequences, std::uint32_t seq_len, std::uint32_t height,
                                    std::uint32_t width, std::uint32_t channels);

    bool operator==(const SequenceDataset&) const = default;
};

/// Float [0,1] -> stored byte, rounding to nearest and saturating.
std::uint8_t to_byte(double v);

struct Sprite {
    std::size_t glyph = 0;
    double x = 0, y = 0;    // top-left corner, pixels
    double vx = 0, vy = 0;  // pixels per frame
};

/// Reflects a coordinate about the boundaries 0 and `limit`, negating the
/// velocity at each bounce. Leaves the coordinate in [0, limit].
void reflect(double& pos, double& vel, double limit);

/// One time step: advance, then reflect against the frame borders.
void advance(Sprite& s, std::size_t height, std::size_t width);

/// Initial sprites for one sequence, drawn in the order glyph, x, y, angle,
/// speed per sprite. Speed is uniform in [2, 4).
std::vector<Sprite> sample_sprites(std::uint64_t seed, std::size_t height, std::size_t width, std::size_t n_sprites);

/// Sprite states for t = 0 .. seq_len-1 (frame t uses states[t]).
std::vector<std::vector<Sprite>> simulate(std::uint64_t seed, std::size_t seq_len, std::size_t height,
                                          std::size_t width, std::size_t n_sprites);

/// 16x16 mask of glyph `id` with entries in {0, 1}.
const std::vector<std::uint8_t>& glyph(std::size_t id);

/// Per-pixel max composition of the sprites into a single-channel frame.
void render(const std::vector<Sprite>& sprites, std::size_t height, std::size_t width, std::span<std::uint8_t> out);

/// Sequence k uses seed derive_seed(seed, k), so sequences are independent of
/// one another and of the thread count. `threads` = 0 picks a default.
SequenceDataset generate_sequences(std::uint64_t seed, std::size_t count, std::size_t seq_len, std::size_t height,
                                   std::size_t width, std::size_t n_sprites, std::size_t threads = 1);

void write_dataset(const SequenceDataset& ds, const std::string& path);
SequenceDataset read_dataset(const std::string& path);

/// Serialized form, used by write_dataset/read_dataset.
std::vector<std::uint8_t> encode_dataset(const SequenceDataset& ds);
SequenceDataset decode_dataset(std::span<const std::uint8_t> bytes);

}  // namespace mmvp::data
