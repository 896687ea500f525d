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

#include "mgte/simd/kernels.hpp"

#include <algorithm>

namespace mgte::simd {
namespace {

void accumulate_weighted_delta(std::span<double> dst, std::span<const double> src,
                               std::span<const double> anchor, double weight) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double term = weight * (src[i] - anchor[i]);
        dst[i] = dst[i] + term;
    }
}

std::size_t count_at_least(std::span<const double> values, double threshold) {
    std::size_t n = 0;
    for (double v : values) n += v >= threshold ? 1 : 0;
    return n;
}

void gather_clamped(std::span<const double> rows, std::size_t stride, std::span<const std::uint32_t> cls,
                    double lo, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double p = rows[i * stride + cls[i]];
        out[i] = std::min(std::max(p, lo), 1.0);
    }
}

std::uint32_t max_u32(std::span<const std::uint32_t> values) {
    std::uint32_t m = 0;
    for (std::uint32_t v : values) m = std::max(m, v);
    return m;
}

std::uint64_t shortfall_u32(std::span<const std::uint32_t> values, std::uint32_t cap) {
    std::uint64_t total = 0;
    for (std::uint32_t v : values) total += static_cast<std::uint64_t>(cap - v);
    return total;
}

constexpr KernelTable kScalar{
    Isa::Scalar, accumulate_weighted_delta, count_at_least, gather_clamped, max_u32, shortfall_u32,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace mgte::simd
