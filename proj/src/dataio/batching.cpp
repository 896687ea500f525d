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

#include "mgte/batching.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "mgte/errors.hpp"
#include "mgte/simd/kernels.hpp"

namespace mgte::dataio {

namespace {

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

void cut_batches(BatchPlan& plan) {
    const std::size_t n = plan.order.size();
    for (std::size_t begin = 0; begin < n; begin += plan.batch_size) {
        plan.batches.emplace_back(begin, std::min(begin + plan.batch_size, n));
    }
}

/// Index (0..q) of the full-batch slot the short batch should occupy in a
/// sorted sequence, minimizing total padding; ties go to the last slot.
std::size_t best_short_slot(std::span<const std::uint32_t> sorted, std::size_t bs) {
    const std::size_t n = sorted.size();
    const std::size_t q = n / bs;
    const std::size_t r = n % bs;
    std::vector<std::uint64_t> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];
    auto seg = [&](std::size_t a, std::size_t b) {
        return static_cast<std::uint64_t>(b - a) * sorted[b - 1] - (prefix[b] - prefix[a]);
    };
    // head[j]: full batches aligned at 0 covering [0, j*bs).
    // tail[j]: full batches aligned at r covering [j*bs + r, n).
    std::vector<std::uint64_t> head(q + 1, 0), tail(q + 1, 0);
    for (std::size_t j = 1; j <= q; ++j) head[j] = head[j - 1] + seg((j - 1) * bs, j * bs);
    for (std::size_t j = q; j-- > 0;) tail[j] = tail[j + 1] + seg(j * bs + r, (j + 1) * bs + r);
    std::size_t best = q;
    std::uint64_t best_cost = head[q] + seg(q * bs, n);
    for (std::size_t j = q; j-- > 0;) {
        const std::uint64_t cost = head[j] + seg(j * bs, j * bs + r) + tail[j];
        if (cost < best_cost) {
            best_cost = cost;
            best = j;
        }
    }
    return best;
}

}  // namespace

std::uint32_t word_count(std::string_view text) noexcept {
    std::uint32_t words = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = is_space(c);
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

BatchPlan plan_batches(std::span<const std::uint32_t> word_counts, std::size_t batch_size) {
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    BatchPlan plan;
    plan.batch_size = batch_size;
    plan.order.resize(word_counts.size());
    std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
    std::stable_sort(plan.order.begin(), plan.order.end(),
                     [&](std::size_t a, std::size_t b) { return word_counts[a] < word_counts[b]; });
    const std::size_t n = plan.order.size();
    const std::size_t r = n % batch_size;
    if (r == 0 || n < batch_size) {
        cut_batches(plan);
        return plan;
    }
    std::vector<std::uint32_t> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = word_counts[plan.order[i]];
    const std::size_t slot = best_short_slot(sorted, batch_size);
    std::size_t begin = 0;
    for (std::size_t k = 0; k <= n / batch_size; ++k) {
        const std::size_t len = k == slot ? r : batch_size;
        plan.batches.emplace_back(begin, begin + len);
        begin += len;
    }
    return plan;
}

BatchPlan natural_plan(std::size_t n, std::size_t batch_size) {
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    BatchPlan plan;
    plan.batch_size = batch_size;
    plan.order.resize(n);
    std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
    cut_batches(plan);
    return plan;
}

std::uint64_t padding_cost(const BatchPlan& plan, std::span<const std::uint32_t> word_counts) {
    if (plan.order.size() != word_counts.size()) {
        throw ConfigError("batch plan covers " + std::to_string(plan.order.size()) + " samples, counts list has " +
                          std::to_string(word_counts.size()));
    }
    std::vector<std::uint32_t> permuted(word_counts.size());
    for (std::size_t i = 0; i < plan.order.size(); ++i) {
        if (plan.order[i] >= word_counts.size()) throw ConfigError("batch plan index out of range");
        permuted[i] = word_counts[plan.order[i]];
    }
    const simd::KernelTable& kernels = simd::active_kernels();
    std::uint64_t total = 0;
    for (const auto& [begin, end] : plan.batches) {
        if (begin > end || end > permuted.size()) throw ConfigError("batch range out of bounds");
        const std::span<const std::uint32_t> batch(permuted.data() + begin, end - begin);
        total += kernels.shortfall_u32(batch, kernels.max_u32(batch));
    }
    return total;
}

}  // namespace mgte::dataio
