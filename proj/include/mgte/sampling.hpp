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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mgte/evaluation.hpp"

namespace mgte::dataio {

enum class SubsampleAxis : std::uint8_t { Generator, Domain, Attack, Decoding };

std::string_view to_string(SubsampleAxis axis) noexcept;
/// Comma-separated axis list, e.g. "generator,domain,attack,decoding".
std::vector<SubsampleAxis> parse_subsample_axes(std::string_view text);

struct SubsampleSpec {
    double fraction = 0.1;
    std::vector<SubsampleAxis> axes{SubsampleAxis::Generator, SubsampleAxis::Domain, SubsampleAxis::Attack,
                                    SubsampleAxis::Decoding};
    std::uint64_t seed = 0;

    /// Throws ConfigError unless 0 < fraction <= 1 and axes are non-empty and distinct.
    void validate() const;
};

struct StratumManifestRow {
    std::string stratum;  // axis values joined by '|', in SubsampleSpec::axes order
    std::size_t total = 0;
    std::size_t selected = 0;
};

struct SubsampleResult {
    std::vector<std::string> selected;        // sorted
    std::vector<StratumManifestRow> manifest;  // sorted by stratum
};

/// Balanced stratified subsample. Each stratum keeps floor(fraction * size + 0.5)
/// of its samples, drawn by a partial Fisher-Yates shuffle over the stratum's
/// sorted ids. The generator is seeded from (seed, stratum key), so strata are
/// independent of each other and of input order.
SubsampleResult subsample(const MetaMap& meta, const SubsampleSpec& spec);

/// `stratum,total,selected` CSV.
std::string render_manifest(const SubsampleResult& result);

/// Seed for one stratum's stream. Exposed for tests.
std::uint64_t stratum_seed(std::uint64_t seed, std::string_view stratum) noexcept;

}  // namespace mgte::dataio
