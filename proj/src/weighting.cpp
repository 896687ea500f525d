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

#include "mgte/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "mgte/errors.hpp"

namespace mgte {

WeightVector compute_weights(std::span<const Perplexity> perplexities, double floor_eps) {
    if (perplexities.empty()) throw ConfigError("no perplexities to weight");
    if (!(floor_eps > 0.0) || !std::isfinite(floor_eps)) {
        throw ConfigError("floor_eps must be positive, got " + std::to_string(floor_eps));
    }

    std::unordered_set<std::string_view> seen;
    std::vector<WeightEntry> entries;
    entries.reserve(perplexities.size());
    std::vector<double> inverse;
    inverse.reserve(perplexities.size());
    for (const Perplexity& p : perplexities) {
        if (!seen.insert(p.model_id).second) throw ConfigError("duplicate model_id '" + p.model_id + "'");
        if (!std::isfinite(p.value) || p.value < 1.0) {
            throw ConfigError("perplexity of '" + p.model_id + "' must be a finite value >= 1");
        }
        const double shifted = p.value - 1.0;
        const bool floored = shifted < floor_eps;
        inverse.push_back(1.0 / (floored ? floor_eps : shifted));
        entries.push_back(WeightEntry{p.model_id, 0.0, p.value, floored});
    }

    // Summed in sorted order so permuting the members permutes the weights exactly.
    std::vector<double> sorted = inverse;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (double v : sorted) total += v;
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].weight = inverse[i] / total;
    return WeightVector(std::move(entries));
}

}  // namespace mgte
