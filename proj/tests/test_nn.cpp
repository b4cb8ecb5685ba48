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

#include "doctest.h"
#include "mmvp/gradcheck.hpp"
#include "mmvp/nn.hpp"
#include "test_util.hpp"

using namespace mmvp;
using namespace mmvp::nn;
using mmvp::testing::probe;
using mmvp::testing::random_tensor;
using Td = Tensor<double>;

namespace {

bool bit_equal(const Td& a, const Td& b) {
    if (a.shape() != b.shape()) return false;
    return std::equal(a.data().begin(), a.data().end(), b.data().begin());
}

void randomize(Tensor<double>& t, std::mt19937_64& rng, double amp) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    for (auto& v : t.mutable_data()) v = dist(rng);
}

}  // namespace

TEST_CASE("unshuffle r=1 is the identity") {
    std::mt19937_64 rng(1);
    Td x = random_tensor<double>(rng, {2, 3, 4, 6});
    CHECK(bit_equal(pixel_unshuffle(x, 1), x));
    CHECK(bit_equal(pixel_shuffle(x, 1), x));
}

TEST_CASE("unshuffle index mapping") {
    std::vector<double> v(16);
    for (std::size_t i = 0; i < 16; ++i) v[i] = static_cast<double>(i);
    Td x({1, 1, 4, 4}, v);
    Td y = pixel_unshuffle(x, 2);
    CHECK(y.shape() == Shape{1, 4, 2, 2});
    // Input (y=0, x=1) holds the value 1.
    CHECK(y.at({0, 1, 0, 0}) == 1.0);
    // Full mapping: out[c*4 + dy*2 + dx, yy, xx] = in[yy*2 + dy, xx*2 + dx].
    for (std::size_t dy = 0; dy < 2; ++dy)
        for (std::size_t dx = 0; dx < 2; ++dx)
            for (std::size_t yy = 0; yy < 2; ++yy)
                for (std::size_t xx = 0; xx < 2; ++xx)
                    CHECK(y.at({0, dy * 2 + dx, yy, xx}) == x.at({0, 0, yy * 2 + dy, xx * 2 + dx}));
}

TEST_CASE("shuffle shape arithmetic") {
    Td x = Td::zeros({1, 8, 2, 2});
    CHECK(pixel_shuffle(x, 2).shape() == Shape{1, 2, 4, 4});
}

TEST_CASE("shuffle and unshuffle are exact inverses") {
    std::mt19937_64 rng(7);
    for (std::size_t r : {1, 2, 4, 8}) {
        Td x = random_tensor<double>(rng, {2, 3, 8 * 2, 8 * 3});
        CHECK(bit_equal(pixel_shuffle(pixel_unshuffle(x, r), r), x));
        Td z = random_tensor<double>(rng, {2, 3 * r * r, 3, 2});
        CHECK(bit_equal(pixel_unshuffle(pixel_shuffle(z, r), r), z));
    }
}

TEST_CASE("unshuffle is a permutation of elements") {
    std::mt19937_64 rng(9);
    for (std::size_t r : {2, 4}) {
        Td x = random_tensor<double>(rng, {1, 2, 8, 8});
        auto a = std::vector<double>(x.data().begin(), x.data().end());
        Td y = pixel_unshuffle(x, r);
        auto b = std::vector<double>(y.data().begin(), y.data().end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("shuffle errors") {
    try {
        pixel_unshuffle(Td::zeros({1, 1, 6, 5}), 2);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kShapeMismatch);
        const std::string msg = e.what();
        CHECK(msg.find("H=6") != std::string::npos);
        CHECK(msg.find("W=5") != std::string::npos);
        CHECK(msg.find("r=2") != std::string::npos);
    }
    CHECK_THROWS_AS(pixel_shuffle(Td::zeros({1, 6, 2, 2}), 2), Error);
}

TEST_CASE("shuffle gradients") {
    std::mt19937_64 rng(11);
    Td x = random_tensor<double>(rng, {1, 2, 4, 4});
    Td w1 = random_tensor<double>(rng, {1, 8, 2, 2});
    CHECK(finite_diff_check<double>([&](const Td& v) { return probe(pixel_unshuffle(v, 2), w1); }, x, 1e-6) < 1e-6);
    Td z = random_tensor<double>(rng, {1, 8, 2, 2});
    Td w2 = random_tensor<double>(rng, {1, 2, 4, 4});
    CHECK(finite_diff_check<double>([&](const Td& v) { return probe(pixel_shuffle(v, 2), w2); }, z, 1e-6) < 1e-6);
}

TEST_CASE("fresh RRDB is the identity") {
    Prng prng(3);
    ParamStore<double> store;
    auto block = RrdbBlock<double>::create(store, "rrdb", RrdbConfig::for_channels(8), prng);
    std::mt19937_64 rng(5);
    Td x = random_tensor<double>(rng, {2, 8, 6, 6});
    CHECK(bit_equal(block.forward(x), x));
}

TEST_CASE("RRDB preserves shape and the residual bound") {
    std::mt19937_64 rng(21);
    for (std::size_t c : {4, 8, 12}) {
        Prng prng(c);
        ParamStore<double> store;
        auto cfg = RrdbConfig::for_channels(c);
        CHECK(cfg.growth == std::max<std::size_t>(c / 2, 4));
        auto block = RrdbBlock<double>::create(store, "b", cfg, prng);
        for (auto& conv : block.last_convs()) randomize(conv.weight, rng, 0.1);
        Td x = random_tensor<double>(rng, {1, c, 5, 7});
        Td y = block.forward(x);
        CHECK(y.shape() == x.shape());
        Td f = block.residual(x);
        double diff = 0, fn = 0;
        for (std::size_t i = 0; i < x.numel(); ++i) {
            diff += (y.data()[i] - x.data()[i]) * (y.data()[i] - x.data()[i]);
            fn += f.data()[i] * f.data()[i];
        }
        CHECK(diff > 0.0);
        CHECK(std::sqrt(diff) <= cfg.beta * std::sqrt(fn) * (1 + 1e-12) + 1e-15);
        CHECK(store.total_count() == RrdbBlock<double>::param_count(cfg));
    }
}

TEST_CASE("RRDB rejects channel mismatch") {
    Prng prng(1);
    ParamStore<double> store;
    auto block = RrdbBlock<double>::create(store, "b", RrdbConfig::for_channels(4), prng);
    CHECK_THROWS_AS(block.forward(Td::zeros({1, 5, 4, 4})), Error);
}

TEST_CASE("RRDB gradient check") {
    Prng prng(17);
    ParamStore<double> store;
    auto block = RrdbBlock<double>::create(store, "b", RrdbConfig::for_channels(4), prng);
    std::mt19937_64 rng(23);
    for (auto& conv : block.last_convs()) randomize(conv.weight, rng, 0.3);
    for (auto& [name, t] : store.items()) {
        if (name.find(".bias") != std::string::npos) {
            Tensor<double> b = t;
            randomize(b, rng, 0.1);
        }
    }
    Td x = random_tensor<double>(rng, {1, 4, 5, 5});
    Td w = random_tensor<double>(rng, {1, 4, 5, 5});
    std::vector<Td> params{x};
    std::vector<std::string> names{"x"};
    for (const auto& [name, t] : store.items()) {
        params.push_back(t);
        names.push_back(name);
    }
    auto res = finite_diff_check_params<double>([&] { return probe(block.forward(x), w); }, params, names, 1e-6);
    INFO(res.worst);
    CHECK(res.max_rel_error < 1e-4);
}
