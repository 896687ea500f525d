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

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgte/batching.hpp"
#include "mgte/cli.hpp"
#include "mgte/core_model.hpp"
#include "mgte/evaluation.hpp"

// Serialized forms of the CLI's output documents.
namespace mgte::cli {

using json = nlohmann::json;

json config_json(const RunConfig& config);

json perplexity_document(std::span<const Perplexity> perplexities, const RunConfig& config);
json weights_document(const WeightVector& weights, const RunConfig& config);
WeightVector parse_weights_document(const json& doc);
json threshold_document(const ThresholdCalibration& calibration, double target_fpr, const RunConfig& config);
json batch_plan_document(const dataio::BatchPlan& plan, std::span<const std::uint32_t> word_counts,
                         const RunConfig& config);

/// JSON lines: a {"tool", "config"} header, then one {"id", "probs", "score",
/// "decision"} object per sample. With `threshold` set, each row also carries
/// "thresholded" (HUMAN/MACHINE).
std::string predictions_jsonl(std::span<const EnsemblePrediction> predictions, const RunConfig& config,
                              const std::optional<double>& threshold);
std::vector<EnsemblePrediction> parse_predictions_jsonl(std::istream& in);

/// Pretty JSON with a trailing newline.
std::string dump(const json& doc);

}  // namespace mgte::cli
