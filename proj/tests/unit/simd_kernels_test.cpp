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

#include <bit>
#include <cstdlib>
#include <random>
#include <vector>

#include "mgte/simd/kernels.hpp"

namespace mgte::simd {
namespace {

// Lengths straddle every vector width and remainder.
const std::vector<std::size_t> kLengths{0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 100, 1027};

class KernelEquivalence : public ::testing::TestWithParam<const KernelTable*> {};

TEST_P(KernelEquivalence, AccumulateWeightedDeltaIsBitIdentical) {
    const KernelTable& simd = *GetParam();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t n : kLengths) {
        std::vector<double> src(n), anchor(n), base(n);
        for (std::size_t i = 0; i < n; ++i) {
            src[i] = unit(rng);
            anchor[i] = unit(rng);
            base[i] = unit(rng);
        }
        const double w = unit(rng);
        std::vector<double> a = base, b = base;
        scalar_kernels().accumulate_weighted_delta(a, src, anchor, w);
        simd.accumulate_weighted_delta(b, src, anchor, w);
        for (std::size_t i = 0; i < n; ++i) {
            ASSERT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i])) << "n=" << n << " i=" << i;
        }
    }
}

TEST_P(KernelEquivalence, CountAtLeastMatches) {
    const KernelTable& simd = *GetParam();
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> grid(0, 20);  // coarse grid forces ties with the threshold
    for (std::size_t n : kLengths) {
        std::vector<double> v(n);
        for (double& x : v) x = grid(rng) / 20.0;
        for (double t : {0.0, 0.05, 0.5, 1.0, 1.0000000000000002}) {
            ASSERT_EQ(scalar_kernels().count_at_least(v, t), simd.count_at_least(v, t)) << "n=" << n << " t=" << t;
        }
    }
}

TEST_P(KernelEquivalence, GatherClampedIsBitIdentical) {
    const KernelTable& simd = *GetParam();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t stride : {2u, 3u, 5u}) {
        for (std::size_t n : kLengths) {
            std::vector<double> rows(n * stride);
            for (double& x : rows) x = unit(rng) < 0.1 ? 0.0 : unit(rng);
            std::vector<std::uint32_t> cls(n);
            for (auto& c : cls) c = static_cast<std::uint32_t>(rng() % stride);
            std::vector<double> a(n), b(n);
            scalar_kernels().gather_clamped(rows, stride, cls, 1e-12, a);
            simd.gather_clamped(rows, stride, cls, 1e-12, b);
            for (std::size_t i = 0; i < n; ++i) {
                ASSERT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i]));
            }
        }
    }
}

TEST_P(KernelEquivalence, IntegerReductionsMatch) {
    const KernelTable& simd = *GetParam();
    std::mt19937_64 rng(4);
    for (std::size_t n : kLengths) {
        std::vector<std::uint32_t> v(n);
        for (auto& x : v) x = static_cast<std::uint32_t>(rng() % 5000);
        if (n > 3) v[n / 2] = 0xFFFFFFF0u;  // exercise the unsigned max
        const std::uint32_t mx = scalar_kernels().max_u32(v);
        ASSERT_EQ(mx, simd.max_u32(v)) << "n=" << n;
        ASSERT_EQ(scalar_kernels().shortfall_u32(v, mx), simd.shortfall_u32(v, mx)) << "n=" << n;
    }
}

INSTANTIATE_TEST_SUITE_P(AllIsas, KernelEquivalence, ::testing::ValuesIn(available_kernels().begin(),
                                                                          available_kernels().end()),
                         [](const auto& info) { return std::string(to_string(info.param->isa)); });

TEST(KernelDispatch, ScalarIsAlwaysAvailableAndFirst) {
    ASSERT_FALSE(available_kernels().empty());
    EXPECT_EQ(available_kernels().front()->isa, Isa::Scalar);
    const char* forced = std::getenv("MGTE_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
        EXPECT_EQ(&active_kernels(), &scalar_kernels());
    } else {
        EXPECT_EQ(&active_kernels(), available_kernels().back());
    }
}

TEST(ScalarKernels, HandCases) {
    const KernelTable& k = scalar_kernels();
    const std::vector<std::uint32_t> counts{1, 5};
    EXPECT_EQ(k.max_u32(counts), 5u);
    EXPECT_EQ(k.shortfall_u32(counts, 5), 4u);
    const std::vector<double> scores{0.2, 0.5, 0.9};
    EXPECT_EQ(k.count_at_least(scores, 0.5), 2u);
    EXPECT_EQ(k.count_at_least(scores, 0.0), 3u);
}

}  // namespace
}  // namespace mgte::simd
