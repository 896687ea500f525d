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

// Brute-force reference computations for tests. Nothing here calls into the
// library's numeric code; each routine re-derives its answer the slow, obvious
// way (extended precision, exhaustive scans, plain sets).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace mgte::oracle {

/// exp(-(1/N) sum ln p_i) in long double, p_i clamped to [eps, 1].
inline long double perplexity(const std::vector<double>& true_label_probs, double eps) {
    long double sum = 0.0L;
    for (double p : true_label_probs) {
        long double q = std::min(std::max(static_cast<long double>(p), static_cast<long double>(eps)), 1.0L);
        sum += std::log(q);
    }
    return std::exp(-sum / static_cast<long double>(true_label_probs.size()));
}

/// Softmax of one row in long double, without max subtraction (callers keep logits small).
inline std::vector<long double> softmax(const std::vector<double>& logits) {
    std::vector<long double> e(logits.size());
    long double total = 0.0L;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        e[i] = std::exp(static_cast<long double>(logits[i]));
        total += e[i];
    }
    for (auto& v : e) v /= total;
    return e;
}

inline std::vector<long double> weights(const std::vector<double>& perplexities, double floor_eps) {
    std::vector<long double> inv;
    long double total = 0.0L;
    for (double p : perplexities) {
        long double a = std::max(static_cast<long double>(p) - 1.0L, static_cast<long double>(floor_eps));
        inv.push_back(1.0L / a);
        total += inv.back();
    }
    for (auto& v : inv) v /= total;
    return inv;
}

struct CalibrationAnswer {
    double threshold;
    double fpr;
    double tpr;  // NaN when there are no machine samples
};

/// Every candidate threshold (observed scores plus one ulp above 1), scored
/// by direct counting; keeps the max-TPR feasible candidate, ties to the
/// smallest threshold.
inline CalibrationAnswer exhaustive_calibration(const std::vector<double>& scores, const std::vector<bool>& is_machine,
                                                double target_fpr) {
    std::set<double> cands(scores.begin(), scores.end());
    cands.insert(1.0 + std::numeric_limits<double>::epsilon());
    CalibrationAnswer best{0.0, 0.0, -1.0};
    double best_key = -1.0;
    for (double t : cands) {
        std::size_t h = 0, fp = 0, m = 0, tp = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (is_machine[i]) {
                ++m;
                tp += scores[i] >= t;
            } else {
                ++h;
                fp += scores[i] >= t;
            }
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(h);
        if (!(fpr <= target_fpr)) continue;
        const double tpr = m == 0 ? std::numeric_limits<double>::quiet_NaN()
                                  : static_cast<double>(tp) / static_cast<double>(m);
        const double key = m == 0 ? 0.0 : tpr;
        if (key > best_key) {
            best = {t, fpr, tpr};
            best_key = key;
        }
    }
    return best;
}

/// Padding of a plan given as explicit batches of sample indices.
inline std::uint64_t padding(const std::vector<std::vector<std::size_t>>& batches,
                             const std::vector<std::uint32_t>& counts) {
    std::uint64_t total = 0;
    for (const auto& b : batches) {
        std::uint32_t mx = 0;
        for (std::size_t i : b) mx = std::max(mx, counts[i]);
        for (std::size_t i : b) total += mx - counts[i];
    }
    return total;
}

/// Consecutive batches over `order`.
inline std::vector<std::vector<std::size_t>> chunk(const std::vector<std::size_t>& order, std::size_t batch_size) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < order.size(); i += batch_size) {
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + batch_size)));
    }
    return out;
}

}  // namespace mgte::oracle
