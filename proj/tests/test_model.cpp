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
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mmvp/gradcheck.hpp"
#include "mmvp/model.hpp"
#include "model_oracles.hpp"
#include "test_util.hpp"

using namespace mmvp;
using mmvp::testing::probe;
using mmvp::testing::random_tensor;
using Td = Tensor<double>;

namespace {

ModelConfig tiny_config() {
    ModelConfig c;
    c.H = c.W = 8;
    c.T = 2;
    c.T_prime = 1;
    c.C_img = 4;
    c.C_motion = 4;
    c.S = 2;
    c.scales = {1.0, 0.5};
    return c;
}

ModelConfig small_config() {
    ModelConfig c;
    c.H = c.W = 16;
    c.T = 3;
    c.T_prime = 4;
    c.C_img = 4;
    c.C_motion = 4;
    c.S = 4;
    c.scales = {1.0, 0.5, 0.25, 0.125};
    return c;
}

bool bit_equal(std::span<const double> a, std::span<const double> b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

std::span<const double> block(const Td& t, std::size_t index) {
    const std::size_t n = t.numel() / t.dim(0);
    return t.data().subspan(index * n, n);
}

template <typename T>
void randomize_all(Model<T>& m, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    for (auto& [name, t] : m.params().items()) {
        Tensor<T> p = t;
        for (auto& v : p.mutable_data()) v = static_cast<T>(dist(rng));
    }
}

ErrorCode config_error(const ModelConfig& c) {
    try {
        c.validate();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("config levels and validation") {
    ModelConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.composition_levels() == std::vector<std::size_t>{1, 2, 3});
    CHECK(c.matrix_level() == 2);
    CHECK(c.top_level() == 3);
    CHECK(c.grid_size() == 256);
    c.include_image = false;
    CHECK(c.composition_levels() == std::vector<std::size_t>{0, 1, 2, 3});

    auto bad = ModelConfig{};
    bad.T = 1;
    CHECK(config_error(bad) == ErrorCode::kConfigInvalid);
    bad = ModelConfig{};
    bad.S = 3;
    CHECK(config_error(bad) == ErrorCode::kConfigInvalid);
    bad = ModelConfig{};
    bad.H = 60;
    CHECK(config_error(bad) == ErrorCode::kConfigInvalid);
    bad = ModelConfig{};
    bad.scales = {1.0, 0.3};
    CHECK(config_error(bad) == ErrorCode::kConfigInvalid);
    bad = ModelConfig{};
    bad.scales = {1.0};
    CHECK(config_error(bad) == ErrorCode::kConfigInvalid);
    bad = ModelConfig{};
    bad.T_prime = 0;
    CHECK(config_error(bad) == ErrorCode::kConfigInvalid);
}

TEST_CASE("encoder is per-frame") {
    const auto c = small_config();
    Model<double> m(c, 3);
    std::mt19937_64 rng(1);
    Td a = random_tensor<double>(rng, {1, 1, 16, 16}, 0, 1);
    Td b = random_tensor<double>(rng, {1, 1, 16, 16}, 0, 1);
    Td frames = concat<double>({a, b, a}, 0);
    Td swapped = concat<double>({b, a, a}, 0);
    NoGradScope<double> ng;
    auto p = m.encode(frames);
    auto q = m.encode(swapped);
    for (const auto& [level, f] : p.levels) {
        CHECK(bit_equal(block(f, 0), block(f, 2)));
        CHECK(bit_equal(block(f, 0), block(q.levels.at(level), 1)));
        CHECK(bit_equal(block(f, 1), block(q.levels.at(level), 0)));
        CHECK(f.dim(2) == (c.H >> level));
        CHECK(f.dim(1) == c.channels_at(level));
    }
    CHECK(p.g.dim(2) == c.H / c.S);
}

TEST_CASE("toy matrix grid is 16x16") {
    ModelConfig c;
    Model<float> m(c, 1);
    NoGradScope<float> ng;
    auto p = m.encode(Tensor<float>::zeros({1, 1, 64, 64}));
    CHECK(p.g.shape() == Shape{1, 16, 16, 16});
    CHECK(p.levels.at(c.matrix_level()).dim(2) == 16);
}

TEST_CASE("gradient reaches the encoder from every level") {
    const auto c = small_config();
    Model<double> m(c, 5);
    std::mt19937_64 rng(2);
    randomize_all(m, rng, 0.2);
    Td frames = random_tensor<double>(rng, {2, 1, 16, 16}, 0, 1);
    for (std::size_t level = 0; level <= c.top_level(); ++level) {
        m.params().zero_grad();
        Tape<double> tape;
        {
            TapeScope<double> scope(tape);
            auto p = m.encode(frames);
            tape.backward(sum(p.levels.at(level)));
        }
        const auto& stem = m.params().get("encoder.stem.weight");
        REQUIRE(stem.has_grad());
        double norm = 0;
        for (auto v : stem.grad()) norm += std::abs(v);
        CHECK(norm > 0.0);
    }
}

TEST_CASE("filter block") {
    auto c = small_config();
    Model<double> m(c, 4);
    std::mt19937_64 rng(3);
    Td f = random_tensor<double>(rng, {2, c.channels_at(c.matrix_level()), 4, 4});
    NoGradScope<double> ng;
    auto g = m.filter(f);
    CHECK(g.dim(2) == 4);
    CHECK(g.dim(3) == 4);
    CHECK(g.dim(1) == c.C_img);
    CHECK_THROWS_AS(m.filter(random_tensor<double>(rng, {2, c.channels_at(c.matrix_level()), 8, 8})), Error);

    c.use_filter = false;
    Model<double> raw(c, 4);
    CHECK(raw.count_params().filter == 0);
    CHECK(bit_equal(raw.filter(f).data(), f.data()));
}

TEST_CASE("filter gradient check") {
    const auto c = small_config();
    Model<double> m(c, 4);
    std::mt19937_64 rng(4);
    randomize_all(m, rng, 0.3);
    Td f = random_tensor<double>(rng, {1, c.channels_at(c.matrix_level()), 4, 4});
    Td w = random_tensor<double>(rng, {1, c.C_img, 4, 4});
    std::vector<Td> params{f, m.params().get("filter.conv1.weight"), m.params().get("filter.conv1.bias"),
                           m.params().get("filter.conv2.weight"), m.params().get("filter.conv2.bias")};
    auto res = finite_diff_check_params<double>([&] { return probe(m.filter(f), w); }, params,
                                                {"f", "w1", "b1", "w2", "b2"}, 1e-6);
    INFO(res.worst);
    CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("cosine matrix examples") {
    // Three distinct patch vectors, reused in the next frame.
    Td g({1, 2, 2, 3}, {1, 0, 1, 0, 1, 1, 1, 0, 1, 0, 1, 1});
    auto m = build_motion_matrices(g);
    CHECK(m.values.shape() == Shape{1, 1, 3, 3});
    for (std::size_t p = 0; p < 3; ++p) CHECK(m.values.at({0, 0, p, p}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(m.normalized);

    Td o({1, 2, 2, 2}, {1, 0, 0, 1, 0, -1, 1, 0});
    auto mo = build_motion_matrices(o);
    // frame 0 patches: (1,0), (0,1); frame 1 patches: (0,1), (-1,0).
    CHECK(mo.values.at({0, 0, 0, 0}) == 0.0);
    CHECK(mo.values.at({0, 0, 0, 1}) == doctest::Approx(-1.0));
    CHECK(mo.values.at({0, 0, 1, 0}) == doctest::Approx(1.0));

    Td z({1, 2, 2, 1}, {0, 0, 1, 1});
    CHECK(build_motion_matrices(z).values.at({0, 0, 0, 0}) == 0.0);
}

TEST_CASE("toy config yields nine 256x256 matrices") {
    std::mt19937_64 rng(5);
    Tensor<float> g = random_tensor<float>(rng, {1, 10, 16, 256});
    auto m = build_motion_matrices(g);
    CHECK(m.values.shape() == Shape{1, 9, 256, 256});
}

TEST_CASE("raw matrix entries stay in [-1, 1]") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        Td g = random_tensor<double>(rng, {2, 3, 5, 9}, -10, 10);
        const auto m = build_motion_matrices(g);
        for (auto v : m.values.data()) {
            CHECK(v <= 1.0 + 1e-6);
            CHECK(v >= -1.0 - 1e-6);
        }
    }
}

TEST_CASE("zero predictor gives uniform transport") {
    auto c = small_config();
    Model<double> m(c, 7);
    for (const char* name : {"predictor.conv1", "predictor.conv2", "predictor.conv3"}) {
        for (const char* part : {".weight", ".bias"}) {
            Tensor<double> p = m.params().get(std::string(name) + part);
            for (auto& v : p.mutable_data()) v = 0.0;
        }
    }
    std::mt19937_64 rng(7);
    MotionMatrices<double> raw{random_tensor<double>(rng, {2, c.T - 1, 16, 16}), false};
    NoGradScope<double> ng;
    auto pred = m.predict_matrices(raw);
    CHECK(pred.values.shape() == Shape{2, c.T_prime, 16, 16});
    for (auto v : pred.values.data()) CHECK(v == 0.0);
    const auto uniform = normalize_matrix(pred);
    for (auto v : uniform.values.data()) CHECK(v == doctest::Approx(1.0 / 16));
}

TEST_CASE("predictor emits T' matrices for any T") {
    for (std::size_t t : {2, 3, 5}) {
        for (std::size_t tp : {1, 4, 7}) {
            auto c = small_config();
            c.T = t;
            c.T_prime = tp;
            Model<double> m(c, 1);
            std::mt19937_64 rng(t * 10 + tp);
            MotionMatrices<double> raw{random_tensor<double>(rng, {1, t - 1, 16, 16}), false};
            NoGradScope<double> ng;
            CHECK(m.predict_matrices(raw).values.shape() == Shape{1, tp, 16, 16});
        }
    }
}

TEST_CASE("predictor gradient check") {
    auto c = small_config();
    c.T = 3;
    c.T_prime = 3;
    Model<double> m(c, 8);
    std::mt19937_64 rng(8);
    MotionMatrices<double> raw{random_tensor<double>(rng, {1, 2, 16, 16}), false};
    Td w = random_tensor<double>(rng, {1, 3, 16, 16});
    std::vector<Td> params{raw.values};
    std::vector<std::string> names{"raw"};
    for (const auto& [name, t] : m.params().items()) {
        if (name.rfind("predictor.", 0) == 0) {
            params.push_back(t);
            names.push_back(name);
        }
    }
    auto res = finite_diff_check_params<double>([&] { return probe(m.predict_matrices(raw).values, w); }, params,
                                                names, 1e-6, 7);
    INFO(res.worst);
    CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("normalize_matrix examples") {
    MotionMatrices<double> u{Td::full({1, 1, 4, 4}, 0.3), false};
    auto nu = normalize_matrix(u);
    CHECK(nu.normalized);
    for (auto v : nu.values.data()) CHECK(v == doctest::Approx(0.25));

    Td peak = Td::zeros({1, 1, 3, 5});
    peak.mutable_data()[7] = 50.0;  // row 1, column 2
    auto np = normalize_matrix(MotionMatrices<double>{peak, false});
    CHECK(np.values.at({0, 0, 1, 2}) > 1.0 - 1e-6);

    std::mt19937_64 rng(9);
    auto nr = normalize_matrix(MotionMatrices<double>{random_tensor<double>(rng, {2, 3, 6, 6}, -1, 1), false});
    for (std::size_t row = 0; row < 2 * 3 * 6; ++row) {
        double s = 0;
        for (std::size_t q = 0; q < 6; ++q) s += nr.values.data()[row * 6 + q];
        CHECK(std::abs(s - 1.0) < 1e-6);
    }
    CHECK_THROWS_AS(normalize_matrix(nr), Error);
}

TEST_CASE("composition with identity transport returns the source") {
    std::mt19937_64 rng(10);
    Td x = random_tensor<double>(rng, {2, 1, 5, 9});
    Td eye = Td::zeros({2, 3, 9, 9});
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t p = 0; p < 9; ++p) eye.mutable_data()[((n * 3 + j) * 9 + p) * 9 + p] = 1.0;
    Td out = compose_flat(x, Td(), eye, false);
    CHECK(out.shape() == Shape{2, 3, 5, 9});
    for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t d = 0; d < 5; ++d)
                for (std::size_t p = 0; p < 9; ++p)
                    CHECK(std::abs(out.at({n, j, d, p}) - x.at({n, 0, d, p})) <= 1e-7);
}

TEST_CASE("composition with a permutation gathers patches") {
    std::mt19937_64 rng(11);
    const std::size_t hw = 16;
    std::vector<std::size_t> perm(hw);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Td p = Td::zeros({1, 1, hw, hw});
    for (std::size_t src = 0; src < hw; ++src) p.mutable_data()[src * hw + perm[src]] = 1.0;
    Td x = random_tensor<double>(rng, {1, 1, 3, hw});
    Td out = compose_flat(x, Td(), p, false);
    for (std::size_t src = 0; src < hw; ++src)
        for (std::size_t d = 0; d < 3; ++d) CHECK(out.at({0, 0, d, perm[src]}) == x.at({0, 0, d, src}));
}

TEST_CASE("composition matches the brute-force oracle") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t t = 1 + trial % 4, tp = 1 + trial % 3, n = 1 + trial % 2, d = 3;
        const std::size_t hw = 16;
        Td x = random_tensor<double>(rng, {n, t, d, hw});
        auto chain = t > 1 ? oracle::random_stochastic(rng, n, t - 1, hw) : Td();
        auto fut = oracle::random_stochastic(rng, n, tp, hw);
        const bool average = trial % 2 == 1;
        Td got = compose_flat(x, chain, fut, average);
        Td want = oracle::compose_loops(x, chain, fut, average);
        REQUIRE(got.shape() == want.shape());
        for (std::size_t i = 0; i < got.numel(); ++i) CHECK(std::abs(got.data()[i] - want.data()[i]) <= 1e-5);
    }
}

TEST_CASE("composition terms conserve mass") {
    std::mt19937_64 rng(13);
    const std::size_t t = 4, hw = 9, d = 2;
    Td chain = oracle::random_stochastic(rng, 1, t - 1, hw);
    Td fut = oracle::random_stochastic(rng, 1, 2, hw);
    for (std::size_t i = 0; i < t; ++i) {
        // Only frame i is nonzero, isolating one term of the sum.
        Td x = Td::zeros({1, t, d, hw});
        Td xi = random_tensor<double>(rng, {d, hw}, 0, 1);
        std::copy(xi.data().begin(), xi.data().end(), x.mutable_data().begin() + i * d * hw);
        Td out = compose_flat(x, chain, fut, false);
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t ch = 0; ch < d; ++ch) {
                double in = 0, o = 0;
                for (std::size_t p = 0; p < hw; ++p) {
                    in += xi.at({ch, p});
                    o += out.at({0, j, ch, p});
                }
                CHECK(std::abs(o - in) <= 1e-4 * std::abs(in));
            }
    }
}

TEST_CASE("grid moves are lossless") {
    std::mt19937_64 rng(14);
    Td fine = random_tensor<double>(rng, {2, 3, 16, 16});
    CHECK(bit_equal(from_grid(to_grid(fine, 4), 16).data(), fine.data()));
    Td coarse = random_tensor<double>(rng, {2, 32, 2, 2});
    auto g = to_grid(coarse, 4);
    CHECK(g.shape() == Shape{2, 8, 4, 4});
    CHECK(bit_equal(from_grid(g, 2).data(), coarse.data()));
}

TEST_CASE("decoder shape and zero input") {
    const auto c = small_config();
    Model<double> m(c, 15);
    typename Model<double>::Composed comp;
    for (auto l : c.composition_levels()) comp.levels[l] = Td::zeros({3, c.channels_at(l), c.H >> l, c.W >> l});
    comp.image = Td::zeros({3, c.C_in, c.H, c.W});
    NoGradScope<double> ng;
    auto out = m.decode(comp);
    CHECK(out.shape() == Shape{3, c.C_in, c.H, c.W});
    // Biases start at zero, so a zero input decodes to exactly zero.
    for (auto v : out.data()) CHECK(v == 0.0);

    std::mt19937_64 rng(15);
    randomize_all(m, rng, 0.2);
    auto a = m.decode(comp);
    auto b = m.decode(comp);
    CHECK(bit_equal(a.data(), b.data()));
    for (auto v : a.data()) CHECK(std::isfinite(v));
    CHECK(bit_equal(block(a, 0), block(a, 2)));

    comp.levels.erase(c.composition_levels().front());
    CHECK_THROWS_AS(m.decode(comp), Error);
}

// Model-level checks run in extended precision: some weights carry gradients
// near 1e-7, below the double-precision roundoff floor of the difference
// quotient, which would swamp the relative error.
TEST_CASE("decoder gradient check") {
    using Tl = Tensor<long double>;
    const auto c = tiny_config();
    Model<long double> m(c, 16);
    std::mt19937_64 rng(16);
    randomize_all(m, rng, 0.3);
    typename Model<long double>::Composed comp;
    std::vector<Tl> params;
    std::vector<std::string> names;
    for (auto l : c.composition_levels()) {
        comp.levels[l] = random_tensor<long double>(rng, {1, c.channels_at(l), c.H >> l, c.W >> l});
        params.push_back(comp.levels[l]);
        names.push_back("composed" + std::to_string(l));
    }
    comp.image = random_tensor<long double>(rng, {1, c.C_in, c.H, c.W});
    params.push_back(comp.image);
    names.push_back("image");
    for (const auto& [name, t] : m.params().items()) {
        if (name.rfind("decoder.", 0) == 0) {
            params.push_back(t);
            names.push_back(name);
        }
    }
    Tl w = random_tensor<long double>(rng, {1, c.C_in, c.H, c.W});
    auto res = finite_diff_check_params<long double>([&] { return probe(m.decode(comp), w); }, params, names,
                                                     1e-6L);
    INFO(res.worst);
    CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("forward is deterministic and the loss is nonnegative") {
    const auto c = small_config();
    Model<float> m(c, 17);
    std::mt19937_64 rng(17);
    auto frames = random_tensor<float>(rng, {2, c.T, 1, 16, 16}, 0, 1);
    auto targets = random_tensor<float>(rng, {2, c.T_prime, 1, 16, 16}, 0, 1);
    NoGradScope<float> ng;
    auto a = m.forward(frames, targets);
    auto b = m.forward(frames, targets);
    CHECK(a.loss.item() == b.loss.item());
    CHECK(a.loss.item() >= 0.0f);
    CHECK(a.predictions.shape() == Shape{2, c.T_prime, 1, 16, 16});
    CHECK(a.future.normalized);
    auto p = m.predict(frames);
    for (auto v : p.data()) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    CHECK_THROWS_AS(m.forward(targets, frames), Error);
}

TEST_CASE("parameter counts") {
    nn::ParamStore<double> store;
    Prng rng(1);
    nn::Conv2d<double>::create(store, "c", 2, 4, 3, 1, rng);
    CHECK(store.total_count() == 76);
    CHECK(nn::conv_param_count(2, 4, 3, 2) == 76);

    for (const auto& c : {ModelConfig{}, small_config(), tiny_config()}) {
        Model<float> m(c, 1);
        auto b = m.count_params();
        CHECK(b.encoder + b.filter + b.predictor + b.decoder == b.total);
        CHECK(b.total == oracle::expected_param_count(c));
    }
}

TEST_CASE("end-to-end gradients") {
    using Tl = Tensor<long double>;
    const auto c = tiny_config();
    Model<long double> m(c, 18);
    std::mt19937_64 rng(18);
    randomize_all(m, rng, 0.3);
    auto frames = random_tensor<long double>(rng, {1, c.T, 1, 8, 8}, 0, 1);
    auto targets = random_tensor<long double>(rng, {1, c.T_prime, 1, 8, 8}, 0, 1);
    std::vector<Tl> params;
    std::vector<std::string> names;
    for (const auto& [name, t] : m.params().items()) {
        params.push_back(t);
        names.push_back(name);
    }
    auto res = finite_diff_check_params<long double>([&] { return m.forward(frames, targets).loss; }, params, names,
                                                     1e-6L);
    INFO(res.worst);
    CHECK(res.max_rel_error < 1e-3);
    for (const auto& [name, t] : m.params().items()) {
        INFO(name);
        REQUIRE(t.has_grad());
        for (auto v : t.grad()) CHECK(std::isfinite(static_cast<double>(v)));
    }
}

TEST_CASE("every parameter gets a finite gradient at toy scale") {
    ModelConfig c;
    c.T = 3;
    c.T_prime = 2;
    Model<float> m(c, 19);
    std::mt19937_64 rng(19);
    auto frames = random_tensor<float>(rng, {1, c.T, 1, 64, 64}, 0, 1);
    auto targets = random_tensor<float>(rng, {1, c.T_prime, 1, 64, 64}, 0, 1);
    Tape<float> tape;
    {
        TapeScope<float> scope(tape);
        tape.backward(m.forward(frames, targets).loss);
    }
    for (const auto& [name, t] : m.params().items()) {
        INFO(name);
        REQUIRE(t.has_grad());
        for (auto v : t.grad()) REQUIRE(std::isfinite(v));
    }
}
