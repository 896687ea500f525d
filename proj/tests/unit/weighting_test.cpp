// Copyright 2026 The mgte Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mgte/errors.hpp"
#include "mgte/weighting.hpp"
#include "oracles.hpp"

namespace mgte {
namespace {

std::vector<Perplexity> perps(const std::vector<double>& values) {
    std::vector<Perplexity> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back({"m" + std::to_string(i), values[i], 10});
    return out;
}

TEST(Weights, TwoModels) {
    const WeightVector w = compute_weights(perps({2.0, 3.0}));
    EXPECT_NEAR(w[0].weight, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(w[1].weight, 1.0 / 3.0, 1e-15);
    EXPECT_EQ(w[0].model_id, "m0");
    EXPECT_EQ(w[1].perplexity, 3.0);
    EXPECT_FALSE(w.any_floored());
}

TEST(Weights, SingleModelGetsEverything) {
    for (double p : {1.0, 1.3, 7.0, 1e6}) {
        const WeightVector w = compute_weights(perps({p}));
        EXPECT_EQ(w[0].weight, 1.0) << p;
    }
}

TEST(Weights, EqualPerplexitiesSplitEvenly) {
    const WeightVector w = compute_weights(perps({1.5, 1.5, 1.5}));
    for (const auto& e : w.entries()) EXPECT_EQ(e.weight, w[0].weight);
    EXPECT_NEAR(w[0].weight, 1.0 / 3.0, 1e-15);
}

TEST(Weights, PerfectModelIsFlooredNotInfinite) {
    const WeightVector w = compute_weights(perps({1.0, 2.0}), 1e-6);
    EXPECT_TRUE(w[0].floored);
    EXPECT_FALSE(w[1].floored);
    EXPECT_NEAR(w[0].weight, 0.999999000000999999, 1e-15);
    EXPECT_NEAR(w[1].weight, 9.99999000001e-7, 1e-18);
    EXPECT_TRUE(std::isfinite(w[0].weight));
}

TEST(Weights, Errors) {
    EXPECT_THROW(compute_weights(perps({})), ConfigError);
    EXPECT_THROW(compute_weights(perps({0.5})), ConfigError);
    EXPECT_THROW(compute_weights(perps({INFINITY})), ConfigError);
    EXPECT_THROW(compute_weights(perps({2.0}), 0.0), ConfigError);
    auto dup = perps({2.0, 3.0});
    dup[1].model_id = "m0";
    EXPECT_THROW(compute_weights(dup), ConfigError);
}

std::vector<double> random_perplexities(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> excess(0.0, 5.0);
    std::vector<double> p(1 + rng() % 16);
    for (double& x : p) x = rng() % 10 == 0 ? 1.0 : 1.0 + excess(rng);
    return p;
}

TEST(WeightsProperty, SimplexOrderOracleAndPermutation) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 1000; ++t) {
        const auto p = random_perplexities(rng);
        const WeightVector w = compute_weights(perps(p));
        const auto ref = oracle::weights(p, kDefaultFloorEps);
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            ASSERT_GE(w[i].weight, 0.0);
            ASSERT_NEAR(w[i].weight, static_cast<double>(ref[i]), 1e-12);
            sum += w[i].weight;
            for (std::size_t j = 0; j < p.size(); ++j) {
                if (p[i] < p[j]) {
                    ASSERT_GE(w[i].weight, w[j].weight);
                }
            }
        }
        ASSERT_NEAR(sum, 1.0, 1e-9);

        std::vector<std::size_t> perm(p.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Perplexity> shuffled;
        const auto orig = perps(p);
        for (std::size_t k : perm) shuffled.push_back(orig[k]);
        const WeightVector ws = compute_weights(shuffled);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            ASSERT_EQ(ws[i].weight, w[perm[i]].weight);
            ASSERT_EQ(ws[i].model_id, w[perm[i]].model_id);
        }
    }
}

// Scaling every P - 1 by the same factor leaves the weights unchanged.
TEST(WeightsProperty, ScaleInvariantInShiftedPerplexity) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> excess(0.1, 5.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a(2 + rng() % 8), b;
        for (double& x : a) x = 1.0 + excess(rng);
        for (double x : a) b.push_back(1.0 + 4.0 * (x - 1.0));
        const WeightVector wa = compute_weights(perps(a));
        const WeightVector wb = compute_weights(perps(b));
        for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(wa[i].weight, wb[i].weight, 1e-12);
    }
}

}  // namespace
}  // namespace mgte
