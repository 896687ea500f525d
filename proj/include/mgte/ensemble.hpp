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

#include <limits>
#include <span>
#include <vector>

#include "mgte/core_model.hpp"

namespace mgte {

/// The candidate threshold one ulp above 1.0. No probability reaches it, so it
/// rejects everything; calibration falls back to it when no observed score
/// meets the FPR target.
inline constexpr double kThresholdAboveAll = 1.0 + std::numeric_limits<double>::epsilon();

/// Weighted soft voting: p_ensemble(c) = sum_i w_i * p_i(c).
///
/// Evaluated in the anchored form p_a(c) + sum_{i!=a} w_i * (p_i(c) - p_a(c)),
/// with a the heaviest member (lowest index on ties),
/// which equals the weighted sum whenever the weights sum to one and keeps
/// the degenerate cases exact: equal member rows, a single member, and a
/// one-hot weight vector all return the member row bit-for-bit.
///
/// Every member of `aligned` must hold probabilities and its model set must
/// match the weights' model set (order may differ).
std::vector<EnsemblePrediction> soft_vote(const WeightVector& weights, const AlignedScores& aligned);

/// MACHINE iff score >= threshold. Threshold must lie in [0, kThresholdAboveAll].
std::vector<Label> apply_threshold(std::span<const EnsemblePrediction> predictions, double threshold);

}  // namespace mgte
