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

#include <span>
#include <string_view>
#include <vector>

#include "mgte/core_model.hpp"

namespace mgte {

inline constexpr double kDefaultClampEps = 1e-12;

/// Max-subtracted softmax. Throws NumericInputError on NaN/inf input.
std::vector<double> softmax(std::span<const double> logits);

/// In-place-safe variant: `out` may alias `logits`.
void softmax_into(std::span<const double> logits, std::span<double> out);

/// Classifier perplexity over a labeled split:
///
///     P = exp(-(1/N) * sum_i ln p(y_i | x_i))
///
/// where p(y_i | x_i) is the probability assigned to the true class, after
/// softmax for LOGITS input, clamped to [clamp_eps, 1]. The log terms are
/// summed with Neumaier compensation so the result does not depend on row
/// order beyond rounding of the final exp.
Perplexity compute_perplexity(const ModelScores& scores, std::span<const Label> labels,
                              double clamp_eps = kDefaultClampEps);

/// Same computation over the m-th member of an aligned matrix.
Perplexity compute_perplexity(const AlignedScores& aligned, std::size_t model, double clamp_eps = kDefaultClampEps);

}  // namespace mgte
