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
#include <utility>
#include <vector>

namespace mgte::dataio {

/// Batches over a permutation of sample indices. Each batch is a half-open
/// [begin, end) range of positions in `order`.
struct BatchPlan {
    std::vector<std::size_t> order;
    std::vector<std::pair<std::size_t, std::size_t>> batches;
    std::size_t batch_size = 1;
};

/// Number of whitespace-delimited tokens. ASCII whitespace only; bytes of
/// multi-byte UTF-8 sequences count as word characters.
std::uint32_t word_count(std::string_view text) noexcept;

/// Stable ascending sort of indices by word count, cut into consecutive
/// batches of `batch_size`. When n is not a multiple of `batch_size` the one
/// short batch sits at the slot of the sorted order that minimizes padding
/// (the end on ties), so the plan never pads more than any other batching
/// with the same batch sizes, natural order included.
BatchPlan plan_batches(std::span<const std::uint32_t> word_counts, std::size_t batch_size);

/// Identity order cut the same way; the baseline for padding comparisons.
BatchPlan natural_plan(std::size_t n, std::size_t batch_size);

/// Total padded units: for every batch, sum of (batch max - member count).
std::uint64_t padding_cost(const BatchPlan& plan, std::span<const std::uint32_t> word_counts);

}  // namespace mgte::dataio
