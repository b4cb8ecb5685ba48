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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <thread>

#include "mmvp/data.hpp"
#include "mmvp/error.hpp"
#include "mmvp/prng.hpp"

namespace mmvp::data {

namespace {

using Mask = std::vector<std::uint8_t>;

Mask draw(std::size_t id) {
    constexpr int n = static_cast<int>(kGlyphSize);
    Mask m(kGlyphSize * kGlyphSize, 0);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double dx = x - 7.5, dy = y - 7.5;
            const double r = std::sqrt(dx * dx + dy * dy);
            const double ax = std::abs(dx), ay = std::abs(dy);
            bool on = false;
            switch (id) {
                case 0: on = r <= 7.0; break;                                          // disk
                case 1: on = r <= 7.0 && r >= 4.5; break;                              // ring
                case 2: on = ax <= 6.0 && ay <= 6.0; break;                            // square
                case 3: on = ax <= 6.5 && ay <= 6.5 && (ax >= 4.5 || ay >= 4.5); break;  // frame
                case 4: on = (ax <= 1.5 && ay <= 7.0) || (ay <= 1.5 && ax <= 7.0); break;  // cross
                case 5: on = std::abs(ax - ay) <= 1.0 && ax <= 7.0; break;             // X
                case 6: on = y >= 2 && y <= 13 && ax <= (y - 1) * 0.6; break;          // triangle
                case 7: on = ax + ay <= 7.0; break;                                    // diamond
                case 8: on = ay <= 2.0 && ax <= 7.0; break;                            // H-bar
                case 9: on = ax <= 2.0 && ay <= 7.0; break;                            // V-bar
                default: break;
            }
            m[static_cast<std::size_t>(y * n + x)] = on ? 1 : 0;
        }
    }
    return m;
}

const std::array<Mask, kGlyphCount>& library() {
    static const std::array<Mask, kGlyphCount> glyphs = [] {
        std::array<Mask, kGlyphCount> g;
        for (std::size_t i = 0; i < kGlyphCount; ++i) g[i] = draw(i);
        return g;
    }();
    return glyphs;
}

void check_geometry(std::size_t height, std::size_t width) {
    if (height < kGlyphSize || width < kGlyphSize) {
        fail(ErrorCode::kInvalidArgument, "frame " + std::to_string(height) + "x" + std::to_string(width) +
                                              " cannot hold a " + std::to_string(kGlyphSize) + "x" +
                                              std::to_string(kGlyphSize) + " glyph");
    }
}

}  // namespace

const std::vector<std::uint8_t>& glyph(std::size_t id) {
    if (id >= kGlyphCount) fail(ErrorCode::kOutOfRange, "glyph id " + std::to_string(id) + " out of range");
    return library()[id];
}

void reflect(double& pos, double& vel, double limit) {
    if (limit <= 0.0) {
        pos = 0.0;
        return;
    }
    // A single step never exceeds the frame, but loop so any input converges.
    while (pos < 0.0 || pos > limit) {
        if (pos < 0.0) {
            pos = -pos;
        } else {
            pos = 2.0 * limit - pos;
        }
        vel = -vel;
    }
}

void advance(Sprite& s, std::size_t height, std::size_t width) {
    s.x += s.vx;
    s.y += s.vy;
    reflect(s.x, s.vx, static_cast<double>(width - kGlyphSize));
    reflect(s.y, s.vy, static_cast<double>(height - kGlyphSize));
}

std::vector<Sprite> sample_sprites(std::uint64_t seed, std::size_t height, std::size_t width, std::size_t n_sprites) {
    check_geometry(height, width);
    Prng rng(seed);
    std::vector<Sprite> sprites(n_sprites);
    for (auto& s : sprites) {
        s.glyph = static_cast<std::size_t>(rng.below(kGlyphCount));
        s.x = rng.uniform() * static_cast<double>(width - kGlyphSize);
        s.y = rng.uniform() * static_cast<double>(height - kGlyphSize);
        const double angle = rng.uniform() * 2.0 * std::numbers::pi;
        const double speed = 2.0 + 2.0 * rng.uniform();
        s.vx = speed * std::cos(angle);
        s.vy = speed * std::sin(angle);
    }
    return sprites;
}

std::vector<std::vector<Sprite>> simulate(std::uint64_t seed, std::size_t seq_len, std::size_t height,
                                          std::size_t width, std::size_t n_sprites) {
    std::vector<std::vector<Sprite>> states;
    states.reserve(seq_len);
    auto sprites = sample_sprites(seed, height, width, n_sprites);
    for (std::size_t t = 0; t < seq_len; ++t) {
        if (t > 0)
            for (auto& s : sprites) advance(s, height, width);
        states.push_back(sprites);
    }
    return states;
}

void render(const std::vector<Sprite>& sprites, std::size_t height, std::size_t width, std::span<std::uint8_t> out) {
    if (out.size() != height * width) fail(ErrorCode::kShapeMismatch, "render: output buffer size mismatch");
    std::fill(out.begin(), out.end(), std::uint8_t(0));
    for (const auto& s : sprites) {
        const auto& mask = glyph(s.glyph);
        const auto ox = static_cast<std::size_t>(std::lround(s.x));
        const auto oy = static_cast<std::size_t>(std::lround(s.y));
        for (std::size_t y = 0; y < kGlyphSize; ++y)
            for (std::size_t x = 0; x < kGlyphSize; ++x) {
                const std::uint8_t v = mask[y * kGlyphSize + x] ? 255 : 0;
                auto& px = out[(oy + y) * width + ox + x];
                px = std::max(px, v);
            }
    }
}

SequenceDataset generate_sequences(std::uint64_t seed, std::size_t count, std::size_t seq_len, std::size_t height,
                                   std::size_t width, std::size_t n_sprites, std::size_t threads) {
    check_geometry(height, width);
    if (count == 0 || seq_len == 0 || n_sprites == 0) {
        fail(ErrorCode::kInvalidArgument, "generate_sequences needs count, seq_len and sprites >= 1");
    }
    auto ds = SequenceDataset::allocate(static_cast<std::uint32_t>(count), static_cast<std::uint32_t>(seq_len),
                                        static_cast<std::uint32_t>(height), static_cast<std::uint32_t>(width), 1);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const auto states = simulate(derive_seed(seed, k), seq_len, height, width, n_sprites);
            for (std::size_t t = 0; t < seq_len; ++t) render(states[t], height, width, ds.mutable_frame(k, t));
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        work(0, count);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work, count * i / threads, count * (i + 1) / threads);
        for (auto& th : pool) th.join();
    }
    return ds;
}

}  // namespace mmvp::data
