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


#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "doctest.h"
#include "metric_oracles.hpp"
#include "mmvp/metrics.hpp"

using namespace mmvp;
using namespace mmvp::metrics;

namespace {

Tensor<double> image(std::size_t h, std::size_t w, std::vector<double> v) { return Tensor<double>({h, w}, std::move(v)); }

Tensor<double> random_image(std::mt19937_64& rng, Shape shape, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(shape_numel(shape));
    for (auto& x : v) x = u(rng);
    return Tensor<double>(std::move(shape), std::move(v));
}

std::vector<double> values(const Tensor<double>& t) { return {t.data().begin(), t.data().end()}; }

// Smooth test pattern shared with the externally computed reference values.
std::pair<Tensor<double>, Tensor<double>> pattern_pair() {
    const std::size_t h = 16, w = 20;
    std::vector<double> a(h * w), b(h * w);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            const double fx = double(x), fy = double(y);
            a[y * w + x] = 0.5 + 0.4 * std::sin(0.3 * fx + 0.7 * fy);
            b[y * w + x] = std::clamp(0.5 + 0.35 * std::cos(0.2 * fx - 0.5 * fy) + 0.05 * std::sin(1.3 * fx * fy / 7), 0.0, 1.0);
        }
    return {image(h, w, a), image(h, w, b)};
}

// Sequences whose frame t is frame 0 rolled right by t pixels.
data::SequenceDataset rolling_dataset(std::size_t n, std::size_t len, std::size_t h, std::size_t w, std::uint64_t seed) {
    auto ds = data::SequenceDataset::allocate(n, len, h, w, 1);
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < n; ++s) {
        auto f0 = ds.mutable_frame(s, 0);
        for (auto& p : f0) p = static_cast<std::uint8_t>(rng() & 0xFF);
        for (std::size_t t = 1; t < len; ++t) {
            auto f = ds.mutable_frame(s, t);
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) f[y * w + (x + t) % w] = f0[y * w + x];
        }
    }
    return ds;
}

Tensor<float> roll_forward(const Tensor<float>& observed, std::size_t future) {
    const std::size_t t = observed.dim(0), c = observed.dim(1), h = observed.dim(2), w = observed.dim(3);
    const auto last = observed.data().subspan((t - 1) * c * h * w, c * h * w);
    std::vector<float> out(future * c * h * w);
    for (std::size_t j = 0; j < future; ++j)
        for (std::size_t p = 0; p < c * h; ++p)
            for (std::size_t x = 0; x < w; ++x) out[(j * c * h + p) * w + (x + j + 1) % w] = last[p * w + x];
    return Tensor<float>({future, c, h, w}, std::move(out));
}

}  // namespace

TEST_CASE("psnr closed forms and cap") {
    const auto a = image(8, 8, std::vector<double>(64, 0.5));
    CHECK(psnr(a, a) == kPsnrCap);
    CHECK(psnr(a, image(8, 8, std::vector<double>(64, 0.6))) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(psnr(image(8, 8, std::vector<double>(64, 0.0)), image(8, 8, std::vector<double>(64, 1.0))) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // MSE just under the cap threshold.
    CHECK(psnr(a, image(8, 8, std::vector<double>(64, 0.5 + 0.9e-5))) == kPsnrCap);
    CHECK_THROWS_AS(psnr(a, image(4, 16, std::vector<double>(64, 0.5))), Error);
}

TEST_CASE("ssim closed forms") {
    std::mt19937_64 rng(3);
    const auto a = random_image(rng, {16, 16});
    CHECK(std::abs(ssim(a, a) - 1.0) <= 1e-9);
    const double c1 = 1e-4;
    const double expected = c1 / (1.0 + c1);
    const double got = ssim(image(8, 8, std::vector<double>(64, 0.0)), image(8, 8, std::vector<double>(64, 1.0)));
    CHECK(std::abs(got - expected) <= 1e-15);
    CHECK(got == doctest::Approx(9.999e-5).epsilon(1e-4));
    CHECK_THROWS_AS(ssim(image(6, 9, std::vector<double>(54, 0.0)), image(6, 9, std::vector<double>(54, 0.0))), Error);
}

TEST_CASE("ssim and psnr match externally computed reference values") {
    // Uniform 7x7 window, population moments, L = 1, computed offline with an
    // established image-processing library on the same pattern.
    const auto [a, b] = pattern_pair();
    CHECK(std::abs(ssim(a, b) - 0.01296353635398441) <= 1e-12);
    CHECK(std::abs(psnr(a, b) - 8.482288291509315) <= 1e-12);
}

TEST_CASE("ssim is symmetric, bounded, and 1 only for identical images") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_image(rng, {2, 12, 15});
        const auto b = random_image(rng, {2, 12, 15});
        const double ab = ssim(a, b), ba = ssim(b, a);
        CHECK(std::abs(ab - ba) <= 1e-12);
        CHECK(ab >= -1.0);
        CHECK(ab <= 1.0);
        CHECK(ab < 1.0 - 1e-9);
        // Anti-correlated pair pushes toward the lower bound.
        std::vector<double> inv = values(a);
        for (auto& v : inv) v = 1.0 - v;
        const double neg = ssim(a, Tensor<double>(a.shape(), inv));
        CHECK(neg >= -1.0);
        CHECK(neg < 0.0);
        CHECK(std::abs(ssim(a, a) - 1.0) <= 1e-9);
    }
}

TEST_CASE("mse_sum closed forms") {
    const Tensor<double> z({1, 64, 64}, std::vector<double>(4096, 0.3));
    CHECK(mse_sum(z, z) == 0.0);
    const Tensor<double> off({1, 64, 64}, std::vector<double>(4096, 0.4));
    CHECK(mse_sum(z, off) == doctest::Approx(40.96).epsilon(1e-12));
    // Per-frame sums 10 and 30 average to 20.
    std::vector<double> p(2 * 10, 0.0), g(2 * 10, 0.0);
    for (int i = 0; i < 10; ++i) {
        g[i] = 1.0;
        g[10 + i] = std::sqrt(3.0);
    }
    CHECK(mse_sum(Tensor<double>({2, 10}, p), Tensor<double>({2, 10}, g)) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK_THROWS_AS(mse_sum(z, Tensor<double>({2, 32, 64}, std::vector<double>(4096, 0.3))), Error);
}

TEST_CASE("metrics match direct-formula oracles on random pairs") {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        // Mix unrelated pairs with noisy copies so SSIM spans its range.
        const auto a = random_image(rng, {16, 16});
        std::vector<double> bv = values(a);
        const double amp = u(rng);
        for (auto& v : bv) v = std::clamp(v + amp * (u(rng) - 0.5), 0.0, 1.0);
        const auto b = image(16, 16, bv);
        const auto av = values(a);
        worst = std::max(worst, std::abs(psnr(a, b) - oracle::psnr_direct(av, bv)));
        worst = std::max(worst, std::abs(ssim(a, b) - oracle::ssim_direct(av, bv, 16, 16)));
        const Tensor<double> pa({2, 16, 8}, av), pb({2, 16, 8}, bv);
        const std::vector<oracle::Plane> fa{{av.begin(), av.begin() + 128}, {av.begin() + 128, av.end()}};
        const std::vector<oracle::Plane> fb{{bv.begin(), bv.begin() + 128}, {bv.begin() + 128, bv.end()}};
        worst = std::max(worst, std::abs(mse_sum(pa, pb) - oracle::mse_sum_direct(fa, fb)));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("psnr strictly decreases with noise amplitude") {
    std::mt19937_64 rng(5);
    const auto clean = random_image(rng, {32, 32}, 0.2, 0.8);
    const auto noise = random_image(rng, {32, 32}, -1.0, 1.0);
    double previous = std::numeric_limits<double>::infinity();
    for (double amp : {0.01, 0.05, 0.1}) {
        std::vector<double> v = values(clean);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += amp * noise.data()[i];
        const double p = psnr(image(32, 32, v), clean);
        CHECK(p < previous);
        previous = p;
    }
}

TEST_CASE("difficulty thresholds") {
    CHECK(classify(0.95) == Difficulty::kEasy);
    CHECK(classify(0.75) == Difficulty::kIntermediate);
    CHECK(classify(0.50) == Difficulty::kHard);
    CHECK(classify(0.9) == Difficulty::kEasy);
    CHECK(classify(std::nextafter(0.9, 0.0)) == Difficulty::kIntermediate);
    CHECK(classify(0.6) == Difficulty::kIntermediate);
    CHECK(classify(std::nextafter(0.6, 0.0)) == Difficulty::kHard);
    CHECK(classify(-1.0) == Difficulty::kHard);
    CHECK(classify(1.0) == Difficulty::kEasy);
}

TEST_CASE("difficulty split is total") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::vector<double> probes{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::denorm_min()};
    for (int i = 0; i < 10000; ++i) probes.push_back(u(rng));
    for (double s : probes) {
        const int label = static_cast<int>(classify(s));
        CHECK(label >= 0);
        CHECK(label < int(kDifficultyCount));
    }
}

TEST_CASE("split_difficulty on synthetic pairs") {
    std::mt19937_64 rng(23);
    const auto a = random_image(rng, {16, 16});
    CHECK(split_difficulty(a, a) == Difficulty::kEasy);
    CHECK(split_difficulty(a, random_image(rng, {16, 16})) == Difficulty::kHard);
    // Moderate noise keeps part of the structure.
    std::vector<double> v = values(a);
    std::normal_distribution<double> n(0.0, 0.3);
    for (auto& x : v) x = std::clamp(x + n(rng), 0.0, 1.0);
    const auto b = image(16, 16, v);
    const double s = ssim(a, b);
    CHECK(s >= 0.6);
    CHECK(s < 0.9);
    CHECK(split_difficulty(a, b) == Difficulty::kIntermediate);
}

TEST_CASE("evaluate with a perfect predictor and the baseline") {
    const std::size_t T = 3, Tp = 4;
    const auto ds = rolling_dataset(9, T + Tp + 1, 12, 12, 99);
    const auto perfect = [&](const Tensor<float>& obs) { return roll_forward(obs, Tp); };
    const auto e = evaluate(ds, T, Tp, perfect, 1);
    REQUIRE(e.model.sequences.size() == 9);
    for (const auto& s : e.model.sequences) {
        CHECK(s.psnr == kPsnrCap);
        CHECK(std::abs(s.ssim - 1.0) <= 1e-9);
        CHECK(s.mse_sum == 0.0);
    }
    CHECK(e.model.full.count == 9);
    std::size_t members = 0;
    for (const auto& a : e.model.subsets) members += a.count;
    CHECK(members == 9);
    CHECK(e.baseline.full.psnr < kPsnrCap);
    CHECK(e.baseline.full.mse_sum > 0.0);
    // Labels depend only on ground truth, so both reports agree.
    for (std::size_t s = 0; s < 9; ++s) CHECK(e.model.sequences[s].subset == e.baseline.sequences[s].subset);

    const auto threaded = evaluate(ds, T, Tp, perfect, 3);
    CHECK(evaluation_json(threaded) == evaluation_json(e));
}

TEST_CASE("baseline is perfect on static sprites") {
    const std::size_t T = 4, Tp = 3, H = 24, W = 24;
    auto ds = data::SequenceDataset::allocate(5, T + Tp, H, W, 1);
    for (std::size_t s = 0; s < 5; ++s) {
        auto sprites = data::sample_sprites(1000 + s, H, W, 2);
        for (auto& sp : sprites) sp.vx = sp.vy = 0.0;
        for (std::size_t t = 0; t < T + Tp; ++t) {
            for (auto& sp : sprites) data::advance(sp, H, W);
            data::render(sprites, H, W, ds.mutable_frame(s, t));
        }
    }
    const auto e = evaluate(ds, T, Tp, [&](const Tensor<float>& o) { return roll_forward(o, Tp); }, 2);
    CHECK(e.baseline.full.psnr == kPsnrCap);
    CHECK(e.baseline.full.mse_sum == 0.0);
    CHECK(e.baseline.subset(Difficulty::kEasy).count == 5);
}

TEST_CASE("evaluate errors") {
    const auto ds = rolling_dataset(2, 5, 8, 8, 1);
    const auto ok = [](const Tensor<float>& o) { return roll_forward(o, 2); };
    CHECK_THROWS_AS(evaluate(ds, 4, 2, ok), Error);
    const auto wrong = [](const Tensor<float>& o) { return roll_forward(o, 3); };
    CHECK_THROWS_AS(evaluate(ds, 3, 2, wrong), Error);
    CHECK_THROWS_AS(evaluate(ds, 3, 2, wrong, 2), Error);
}

TEST_CASE("score_datasets and report document") {
    const auto gt = rolling_dataset(6, 8, 10, 10, 7);
    const auto same = score_datasets(gt, gt, 5);
    CHECK(same.full.psnr == kPsnrCap);
    CHECK(same.full.mse_sum == 0.0);
    CHECK_THROWS_AS(score_datasets(gt, gt, 0), Error);
    CHECK_THROWS_AS(score_datasets(gt, gt, 8), Error);
    CHECK_THROWS_AS(score_datasets(rolling_dataset(6, 8, 10, 12, 7), gt, 5), Error);
    CHECK_THROWS_AS(score_datasets(rolling_dataset(6, 9, 10, 10, 7), gt, 5), Error);
    // Shorter predictions score against the matching prefix of gt.
    const auto prefix = rolling_dataset(6, 7, 10, 10, 7);
    CHECK(score_datasets(prefix, gt, 5).full.psnr == kPsnrCap);

    auto noisy = gt;
    for (auto& p : noisy.pixels) p = static_cast<std::uint8_t>(255 - p);
    const auto r = score_datasets(noisy, gt, 5);
    const auto j = nlohmann::json::parse(report_json(r, 5));
    for (const char* key : {"psnr", "ssim", "mse_sum", "subset", "counts"}) CHECK(j.contains(key));
    CHECK(j["counts"]["full"] == 6);
    CHECK(j["counts"]["easy"].get<int>() + j["counts"]["intermediate"].get<int>() + j["counts"]["hard"].get<int>() == 6);
    CHECK(j["psnr"].get<double>() == doctest::Approx(r.full.psnr));
    CHECK(j["data_range"] == 1.0);
    CHECK(j["sequences"].size() == 6);
}
