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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace mgte::simd {

// Data-parallel inner loops used by the ensemble, perplexity, evaluation and
// batching code. Each ISA variant must produce results bit-identical to the
// scalar reference: no FMA contraction, and integer reductions only where
// lane order could otherwise matter.

enum class Isa : std::uint8_t { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
    Isa isa;

    /// dst[i] += weight * (src[i] - anchor[i]); all three spans equal length.
    void (*accumulate_weighted_delta)(std::span<double> dst, std::span<const double> src,
                                      std::span<const double> anchor, double weight);

    /// Number of entries with value >= threshold.
    std::size_t (*count_at_least)(std::span<const double> values, double threshold);

    /// out[i] = clamp(rows[i * stride + cls[i]], lo, 1.0). `rows` holds
    /// out.size() rows of `stride` values, and every cls[i] < stride.
    void (*gather_clamped)(std::span<const double> rows, std::size_t stride,
                           std::span<const std::uint32_t> cls, double lo, std::span<double> out);

    std::uint32_t (*max_u32)(std::span<const std::uint32_t> values);

    /// Sum over i of (cap - values[i]); requires every value <= cap.
    std::uint64_t (*shortfall_u32)(std::span<const std::uint32_t> values, std::uint32_t cap);
};

const KernelTable& scalar_kernels() noexcept;

/// Tables for the ISA variants compiled into this build and supported by the
/// running CPU, scalar first.
std::span<const KernelTable* const> available_kernels() noexcept;

/// Best supported table, chosen on first use. Setting MGTE_SIMD=scalar in the
/// environment forces the reference path.
const KernelTable& active_kernels() noexcept;

namespace detail {
// Per-ISA tables; nullptr when not compiled in.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;
}  // namespace detail

}  // namespace mgte::simd
