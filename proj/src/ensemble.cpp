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

#include "mgte/ensemble.hpp"

#include <string>

#include "mgte/errors.hpp"
#include "mgte/simd/kernels.hpp"

namespace mgte {

namespace {

void check_threshold(double threshold) {
    if (!(threshold >= 0.0 && threshold <= kThresholdAboveAll)) {
        throw ConfigError("threshold must lie in [0, 1], got " + std::to_string(threshold));
    }
}

}  // namespace

std::vector<EnsemblePrediction> soft_vote(const WeightVector& weights, const AlignedScores& aligned) {
    const std::size_t n_models = aligned.num_models();
    if (n_models == 0) throw ConfigError("no ensemble members");
    if (weights.size() != n_models) {
        throw ConfigError("weights name " + std::to_string(weights.size()) + " models but scores hold " +
                          std::to_string(n_models));
    }
    std::vector<double> member_weight(n_models);
    for (std::size_t m = 0; m < n_models; ++m) {
        const auto w = weights.find(aligned.model_ids[m]);
        if (!w) throw ConfigError("no weight for model '" + aligned.model_ids[m] + "'");
        if (aligned.kinds[m] != ScoreKind::Probs) {
            throw ConfigError("member '" + aligned.model_ids[m] + "' holds logits; convert to probabilities first");
        }
        member_weight[m] = weights[*w].weight;
    }

    // Anchor on the heaviest member; zero-weight members contribute nothing.
    std::size_t anchor_model = 0;
    for (std::size_t m = 1; m < n_models; ++m) {
        if (member_weight[m] > member_weight[anchor_model]) anchor_model = m;
    }
    const simd::KernelTable& kernels = simd::active_kernels();
    const std::span<const double> anchor = aligned.slab(anchor_model);
    std::vector<double> fused(anchor.begin(), anchor.end());
    for (std::size_t m = 0; m < n_models; ++m) {
        if (m == anchor_model || member_weight[m] == 0.0) continue;
        kernels.accumulate_weighted_delta(fused, aligned.slab(m), anchor, member_weight[m]);
    }

    const std::size_t k = aligned.num_classes;
    std::vector<EnsemblePrediction> out;
    out.reserve(aligned.num_samples());
    for (std::size_t s = 0; s < aligned.num_samples(); ++s) {
        EnsemblePrediction pred;
        pred.sample_id = aligned.sample_ids[s];
        pred.probs.assign(fused.begin() + static_cast<std::ptrdiff_t>(s * k),
                          fused.begin() + static_cast<std::ptrdiff_t>((s + 1) * k));
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c) {
            if (pred.probs[c] > pred.probs[best]) best = c;
        }
        pred.decision = best;
        pred.score = pred.probs[kMachineClass];
        out.push_back(std::move(pred));
    }
    return out;
}

std::vector<Label> apply_threshold(std::span<const EnsemblePrediction> predictions, double threshold) {
    check_threshold(threshold);
    std::vector<Label> out;
    out.reserve(predictions.size());
    for (const EnsemblePrediction& p : predictions) out.push_back(p.score >= threshold ? Label::Machine : Label::Human);
    return out;
}

}  // namespace mgte
