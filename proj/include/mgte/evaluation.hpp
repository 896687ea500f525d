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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mgte/core_model.hpp"

namespace mgte {

inline constexpr double kDefaultTargetFpr = 0.05;

using MetaMap = std::map<std::string, SampleMeta, std::less<>>;

enum class StratumAxis : std::uint8_t { Generator, Domain, Attack, GeneratorDomain };

std::string_view to_string(StratumAxis axis) noexcept;
/// Accepts generator, domain, attack and generator_domain (also
/// generator-domain, generator*domain, generatorxdomain).
StratumAxis parse_stratum_axis(std::string_view text);
/// Comma-separated list of axes; rejects duplicates.
std::vector<StratumAxis> parse_stratum_axes(std::string_view text);

struct StratumKey {
    StratumAxis axis = StratumAxis::Generator;
    std::string value;   // generator, domain or attack value
    std::string second;  // domain, for GeneratorDomain only

    auto operator<=>(const StratumKey&) const = default;

    /// "generator:gpt4", "generator_domain:gpt4/news", ...
    std::string label() const;
};

struct StratumCell {
    std::size_t n = 0;               // MACHINE samples in the stratum
    std::size_t true_positives = 0;  // of those, score >= threshold
    std::optional<double> tpr;       // empty when n == 0
};

struct EvalReport {
    std::string detector = "ensemble";
    double threshold = 0.0;
    double target_fpr = kDefaultTargetFpr;
    double achieved_fpr = 0.0;
    std::string aggregation = "micro";
    std::vector<StratumAxis> axes;
    std::map<StratumKey, StratumCell> cells;
    std::optional<double> aggregate_tpr;
    std::size_t n_machine = 0;
    std::size_t n_human = 0;
    /// Extra header lines (tool version, resolved config, ...), rendered after
    /// the built-in ones in insertion order.
    std::vector<std::pair<std::string, std::string>> metadata;
};

struct ScoredLabel {
    double score = 0.0;
    Label label = Label::Human;
};

struct ThresholdCalibration {
    double threshold = 0.0;
    double achieved_fpr = 0.0;
    std::size_t n_human = 0;
};

/// Smallest threshold t, drawn from the observed scores plus one value above
/// 1.0, such that the fraction of HUMAN samples with score >= t does not
/// exceed target_fpr. Among feasible thresholds the smallest admits the most
/// MACHINE samples, so it maximizes TPR.
ThresholdCalibration calibrate_threshold(std::span<const ScoredLabel> scores, double target_fpr);

/// Per-stratum and aggregate (micro-averaged) TPR at `threshold`, plus the FPR
/// achieved over all HUMAN predictions. Each axis yields one cell per value
/// observed in the predictions' metadata; strata without MACHINE samples
/// carry an undefined TPR.
EvalReport evaluate(std::span<const EnsemblePrediction> predictions, const MetaMap& meta, double threshold,
                    std::span<const StratumAxis> axes, double target_fpr = kDefaultTargetFpr);

enum class ReportFormat : std::uint8_t { Csv, Markdown };

ReportFormat parse_report_format(std::string_view text);

/// Human-facing column title for a RAID generator id ("gpt4" -> "GPT-4").
/// Unknown generators keep their id.
std::string generator_display_name(std::string_view generator);

std::string render_report(const EvalReport& report, ReportFormat format);

/// Shortest round-trip decimal form of a double.
std::string format_real(double value);

}  // namespace mgte
