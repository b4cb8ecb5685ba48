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
#include <bit>
#include <cmath>
#include <set>

#include "mmvp/error.hpp"
#include "mmvp/model.hpp"

namespace mmvp {

namespace {

[[noreturn]] void invalid(const std::string& msg) { fail(ErrorCode::kConfigInvalid, "invalid config: " + msg); }

std::size_t log2_exact(std::size_t v) { return static_cast<std::size_t>(std::countr_zero(v)); }

std::size_t level_of(double scale) {
    if (!(scale > 0.0 && scale <= 1.0)) invalid("scale " + std::to_string(scale) + " must lie in (0, 1]");
    const double inv = 1.0 / scale;
    const double rounded = std::round(inv);
    const auto d = static_cast<std::size_t>(rounded);
    if (std::abs(inv - rounded) > 1e-9 * rounded || !std::has_single_bit(d)) {
        invalid("scale " + std::to_string(scale) + " is not 1/2^k");
    }
    return log2_exact(d);
}

}  // namespace

std::vector<std::size_t> ModelConfig::scale_levels() const {
    std::vector<std::size_t> levels;
    for (double s : scales) levels.push_back(level_of(s));
    return levels;
}

std::vector<std::size_t> ModelConfig::composition_levels() const {
    std::set<std::size_t> unique;
    for (auto l : scale_levels()) unique.insert(l);
    std::vector<std::size_t> levels(unique.begin(), unique.end());
    if (include_image && !levels.empty()) levels.erase(levels.begin());
    return levels;
}

std::size_t ModelConfig::matrix_level() const { return log2_exact(S); }

std::size_t ModelConfig::top_level() const {
    std::size_t top = matrix_level();
    for (auto l : composition_levels()) top = std::max(top, l);
    return top;
}

void ModelConfig::validate() const {
    if (H == 0 || W == 0 || C_in == 0) invalid("H, W and C_in must be positive");
    if (T < 2) invalid("T must be at least 2 (got " + std::to_string(T) + ")");
    if (T_prime < 1) invalid("T_prime must be at least 1");
    if (C_img == 0 || C_motion == 0) invalid("C_img and C_motion must be positive");
    if (S == 0 || !std::has_single_bit(S)) invalid("S must be a power of two (got " + std::to_string(S) + ")");
    if (scales.empty()) invalid("scales must not be empty");
    const auto levels = scale_levels();
    if (std::set<std::size_t>(levels.begin(), levels.end()).size() != levels.size()) {
        invalid("scales contain duplicates");
    }
    const auto comp = composition_levels();
    if (comp.empty()) invalid("no feature scale left for composition once the image replaces the largest scale");
    const std::size_t denom = std::size_t(1) << top_level();
    if (H % denom != 0 || W % denom != 0 || H % S != 0 || W % S != 0) {
        invalid("H=" + std::to_string(H) + " and W=" + std::to_string(W) + " must be divisible by S=" +
                std::to_string(S) + " and every scale denominator (up to " + std::to_string(denom) + ")");
    }
    for (auto l : comp) {
        if (l > matrix_level()) {
            const std::size_t r = std::size_t(1) << (l - matrix_level());
            if (channels_at(l) % (r * r) != 0) {
                invalid("scale 1/" + std::to_string(std::size_t(1) << l) + " has " + std::to_string(channels_at(l)) +
                        " channels, not divisible by " + std::to_string(r * r) + " for the 1/S grid");
            }
        }
    }
}

}  // namespace mmvp
