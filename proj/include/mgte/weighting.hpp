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

#include "mgte/core_model.hpp"

namespace mgte {

inline constexpr double kDefaultFloorEps = 1e-6;

/// Inverse-perplexity weights. Each perplexity is shifted down by one and
/// floored, a_i = max(P_i - 1, floor_eps), then w_i = (1/a_i) / sum_j (1/a_j).
/// A model whose shift hit the floor is marked `floored` in its entry.
/// Output order matches input order.
WeightVector compute_weights(std::span<const Perplexity> perplexities, double floor_eps = kDefaultFloorEps);

}  // namespace mgte
