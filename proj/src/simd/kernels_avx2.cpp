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

// Compiled with -mavx2 (and deliberately without -mfma) on x86-64 builds; only
// entered after a runtime CPU check in dispatch.cpp.
#if defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>
#include <bit>

namespace mgte::simd {
namespace {

void accumulate_weighted_delta(std::span<double> dst, std::span<const double> src,
                               std::span<const double> anchor, double weight) {
    const std::size_t n = dst.size();
    const __m256d w = _mm256_set1_pd(weight);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d delta = _mm256_sub_pd(_mm256_loadu_pd(src.data() + i), _mm256_loadu_pd(anchor.data() + i));
        const __m256d term = _mm256_mul_pd(w, delta);
        _mm256_storeu_pd(dst.data() + i, _mm256_add_pd(_mm256_loadu_pd(dst.data() + i), term));
    }
    for (; i < n; ++i) {
        const double term = weight * (src[i] - anchor[i]);
        dst[i] = dst[i] + term;
    }
}

std::size_t count_at_least(std::span<const double> values, double threshold) {
    const std::size_t n = values.size();
    const __m256d t = _mm256_set1_pd(threshold);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(values.data() + i), t, _CMP_GE_OQ);
        count += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(ge))));
    }
    for (; i < n; ++i) count += values[i] >= threshold ? 1 : 0;
    return count;
}

void gather_clamped(std::span<const double> rows, std::size_t stride, std::span<const std::uint32_t> cls,
                    double lo, std::span<double> out) {
    const std::size_t n = out.size();
    const __m256d lo_v = _mm256_set1_pd(lo);
    const __m256d one = _mm256_set1_pd(1.0);
    const auto s = static_cast<long long>(stride);
    __m256i row_base = _mm256_set_epi64x(3 * s, 2 * s, s, 0);
    const __m256i step = _mm256_set1_epi64x(4 * s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m128i c32 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cls.data() + i));
        const __m256i idx = _mm256_add_epi64(row_base, _mm256_cvtepu32_epi64(c32));
        const __m256d p = _mm256_i64gather_pd(rows.data(), idx, 8);
        // Operand order mirrors std::min(std::max(p, lo), 1.0).
        _mm256_storeu_pd(out.data() + i, _mm256_min_pd(one, _mm256_max_pd(lo_v, p)));
        row_base = _mm256_add_epi64(row_base, step);
    }
    for (; i < n; ++i) {
        const double p = rows[i * stride + cls[i]];
        out[i] = std::min(std::max(p, lo), 1.0);
    }
}

std::uint32_t max_u32(std::span<const std::uint32_t> values) {
    const std::size_t n = values.size();
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc = _mm256_max_epu32(acc, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values.data() + i)));
    }
    __m128i m = _mm_max_epu32(_mm256_castsi256_si128(acc), _mm256_extracti128_si256(acc, 1));
    m = _mm_max_epu32(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(1, 0, 3, 2)));
    m = _mm_max_epu32(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(2, 3, 0, 1)));
    auto result = static_cast<std::uint32_t>(_mm_cvtsi128_si32(m));
    for (; i < n; ++i) result = std::max(result, values[i]);
    return result;
}

std::uint64_t shortfall_u32(std::span<const std::uint32_t> values, std::uint32_t cap) {
    const std::size_t n = values.size();
    const __m256i cap_v = _mm256_set1_epi32(static_cast<int>(cap));
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i gap =
            _mm256_sub_epi32(cap_v, _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values.data() + i)));
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_castsi256_si128(gap)));
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_extracti128_si256(gap, 1)));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) total += static_cast<std::uint64_t>(cap - values[i]);
    return total;
}

constexpr KernelTable kAvx2{
    Isa::Avx2, accumulate_weighted_delta, count_at_least, gather_clamped, max_u32, shortfall_u32,
};

}  // namespace

namespace detail {
const KernelTable* avx2_kernels() noexcept { return &kAvx2; }
}  // namespace detail

}  // namespace mgte::simd

#else

namespace mgte::simd::detail {
const KernelTable* avx2_kernels() noexcept { return nullptr; }
}  // namespace mgte::simd::detail

#endif
