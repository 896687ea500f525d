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

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <algorithm>

namespace mgte::simd {
namespace {

void accumulate_weighted_delta(std::span<double> dst, std::span<const double> src,
                               std::span<const double> anchor, double weight) {
    const std::size_t n = dst.size();
    const float64x2_t w = vdupq_n_f64(weight);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t delta = vsubq_f64(vld1q_f64(src.data() + i), vld1q_f64(anchor.data() + i));
        // Separate multiply and add; vfmaq would round once and diverge from scalar.
        const float64x2_t term = vmulq_f64(w, delta);
        vst1q_f64(dst.data() + i, vaddq_f64(vld1q_f64(dst.data() + i), term));
    }
    for (; i < n; ++i) {
        const double term = weight * (src[i] - anchor[i]);
        dst[i] = dst[i] + term;
    }
}

std::size_t count_at_least(std::span<const double> values, double threshold) {
    const std::size_t n = values.size();
    const float64x2_t t = vdupq_n_f64(threshold);
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        // Matching lanes are all-ones, so subtracting adds one per match.
        acc = vsubq_u64(acc, vcgeq_f64(vld1q_f64(values.data() + i), t));
    }
    auto count = static_cast<std::size_t>(vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1));
    for (; i < n; ++i) count += values[i] >= threshold ? 1 : 0;
    return count;
}

void gather_clamped(std::span<const double> rows, std::size_t stride, std::span<const std::uint32_t> cls,
                    double lo, std::span<double> out) {
    // No gather instruction; the clamp is the vector part.
    const std::size_t n = out.size();
    const float64x2_t lo_v = vdupq_n_f64(lo);
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const double pair[2] = {rows[i * stride + cls[i]], rows[(i + 1) * stride + cls[i + 1]]};
        vst1q_f64(out.data() + i, vminq_f64(one, vmaxq_f64(lo_v, vld1q_f64(pair))));
    }
    for (; i < n; ++i) {
        const double p = rows[i * stride + cls[i]];
        out[i] = std::min(std::max(p, lo), 1.0);
    }
}

std::uint32_t max_u32(std::span<const std::uint32_t> values) {
    const std::size_t n = values.size();
    uint32x4_t acc = vdupq_n_u32(0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = vmaxq_u32(acc, vld1q_u32(values.data() + i));
    std::uint32_t result = vmaxvq_u32(acc);
    for (; i < n; ++i) result = std::max(result, values[i]);
    return result;
}

std::uint64_t shortfall_u32(std::span<const std::uint32_t> values, std::uint32_t cap) {
    const std::size_t n = values.size();
    const uint32x4_t cap_v = vdupq_n_u32(cap);
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const uint32x4_t gap = vsubq_u32(cap_v, vld1q_u32(values.data() + i));
        acc = vpadalq_u32(acc, gap);
    }
    std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
    for (; i < n; ++i) total += static_cast<std::uint64_t>(cap - values[i]);
    return total;
}

constexpr KernelTable kNeon{
    Isa::Neon, accumulate_weighted_delta, count_at_least, gather_clamped, max_u32, shortfall_u32,
};

}  // namespace

namespace detail {
const KernelTable* neon_kernels() noexcept { return &kNeon; }
}  // namespace detail

}  // namespace mgte::simd

#else

namespace mgte::simd::detail {
const KernelTable* neon_kernels() noexcept { return nullptr; }
}  // namespace mgte::simd::detail

#endif
