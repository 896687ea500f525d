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

#include "outputs.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "mgte/errors.hpp"

namespace mgte::cli {

namespace {

json tool_field() { return std::string("mgte ") + std::string(tool_version()); }

json decision_field(std::size_t cls) {
    if (cls == class_index(Label::Human)) return "HUMAN";
    if (cls == class_index(Label::Machine)) return "MACHINE";
    return cls;
}

std::size_t parse_decision(const json& v, std::size_t line) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "HUMAN") return class_index(Label::Human);
        if (s == "MACHINE") return class_index(Label::Machine);
    } else if (v.is_number_unsigned()) {
        return v.get<std::size_t>();
    }
    throw SchemaError("unrecognized decision on line " + std::to_string(line));
}

}  // namespace

std::string_view tool_version() noexcept { return MGTE_VERSION; }

json config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["dataset"] = c.dataset;
    j["dataset_format"] = c.dataset_format;
    j["scores"] = c.scores;
    j["calibration_ids"] = c.calibration_ids;
    j["eval_ids"] = c.eval_ids;
    j["weights"] = c.weights;
    j["predictions"] = c.predictions;
    j["word_counts"] = c.word_counts;
    j["threshold"] = c.threshold ? json(*c.threshold) : json(nullptr);
    j["target_fpr"] = c.target_fpr;
    j["clamp_eps"] = c.clamp_eps;
    j["floor_eps"] = c.floor_eps;
    j["align"] = c.align;
    j["strata"] = c.strata;
    j["fraction"] = c.fraction;
    j["seed"] = c.seed;
    j["format"] = c.format;
    j["batch_size"] = c.batch_size;
    j["allow_overlap"] = c.allow_overlap;
    j["detector"] = c.detector;
    return j;
}

json perplexity_document(std::span<const Perplexity> perplexities, const RunConfig& config) {
    json rows = json::array();
    for (const Perplexity& p : perplexities) {
        rows.push_back({{"model_id", p.model_id}, {"perplexity", p.value}, {"n_samples", p.n_samples}});
    }
    return {{"tool", tool_field()}, {"config", config_json(config)}, {"perplexities", rows}};
}

json weights_document(const WeightVector& weights, const RunConfig& config) {
    json rows = json::array();
    json floored = json::array();
    for (const WeightEntry& e : weights.entries()) {
        rows.push_back({{"model_id", e.model_id},
                        {"perplexity", e.perplexity},
                        {"weight", e.weight},
                        {"floored", e.floored}});
        if (e.floored) floored.push_back(e.model_id);
    }
    return {{"tool", tool_field()},
            {"config", config_json(config)},
            {"floor_eps", config.floor_eps},
            {"floored_models", floored},
            {"weights", rows}};
}

WeightVector parse_weights_document(const json& doc) {
    auto it = doc.find("weights");
    if (it == doc.end() || !it->is_array()) throw SchemaError("weights document has no \"weights\" array");
    std::vector<WeightEntry> entries;
    for (const json& row : *it) {
        if (!row.is_object() || !row.contains("model_id") || !row.contains("weight") ||
            !row["model_id"].is_string() || !row["weight"].is_number()) {
            throw SchemaError("weights entries need a string model_id and a numeric weight");
        }
        WeightEntry e;
        e.model_id = row["model_id"].get<std::string>();
        e.weight = row["weight"].get<double>();
        if (row.contains("perplexity") && row["perplexity"].is_number()) e.perplexity = row["perplexity"].get<double>();
        if (row.contains("floored") && row["floored"].is_boolean()) e.floored = row["floored"].get<bool>();
        entries.push_back(std::move(e));
    }
    return WeightVector(std::move(entries));
}

json threshold_document(const ThresholdCalibration& calibration, double target_fpr, const RunConfig& config) {
    return {{"tool", tool_field()},
            {"config", config_json(config)},
            {"threshold", calibration.threshold},
            {"target_fpr", target_fpr},
            {"achieved_fpr", calibration.achieved_fpr},
            {"n_human", calibration.n_human},
            {"decision_rule", "score >= threshold"}};
}

json batch_plan_document(const dataio::BatchPlan& plan, std::span<const std::uint32_t> word_counts,
                         const RunConfig& config) {
    json batches = json::array();
    for (const auto& [begin, end] : plan.batches) batches.push_back({begin, end});
    const auto natural = dataio::natural_plan(word_counts.size(), plan.batch_size);
    return {{"tool", tool_field()},
            {"config", config_json(config)},
            {"batch_size", plan.batch_size},
            {"order", plan.order},
            {"batches", batches},
            {"padding_cost", dataio::padding_cost(plan, word_counts)},
            {"natural_padding_cost", dataio::padding_cost(natural, word_counts)}};
}

std::string predictions_jsonl(std::span<const EnsemblePrediction> predictions, const RunConfig& config,
                              const std::optional<double>& threshold) {
    std::ostringstream out;
    json header{{"tool", tool_field()}, {"config", config_json(config)}};
    if (threshold) header["threshold"] = *threshold;
    out << header.dump() << '\n';
    for (const EnsemblePrediction& p : predictions) {
        json row{{"id", p.sample_id}, {"probs", p.probs}, {"score", p.score}, {"decision", decision_field(p.decision)}};
        if (threshold) row["thresholded"] = p.score >= *threshold ? "MACHINE" : "HUMAN";
        out << row.dump() << '\n';
    }
    return out.str();
}

std::vector<EnsemblePrediction> parse_predictions_jsonl(std::istream& in) {
    std::vector<EnsemblePrediction> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        json row;
        try {
            row = json::parse(text);
        } catch (const json::parse_error& e) {
            throw SchemaError("predictions line " + std::to_string(line) + " is not valid JSON: " + e.what());
        }
        if (!row.is_object()) throw SchemaError("predictions line " + std::to_string(line) + " is not an object");
        if (!row.contains("id")) {
            if (row.contains("tool")) continue;  // header
            throw SchemaError("predictions line " + std::to_string(line) + " has no \"id\"");
        }
        EnsemblePrediction p;
        try {
            p.sample_id = row.at("id").get<std::string>();
            p.probs = row.at("probs").get<std::vector<double>>();
            p.score = row.at("score").get<double>();
        } catch (const json::exception&) {
            throw SchemaError("predictions line " + std::to_string(line) + " lacks id/probs/score fields");
        }
        p.decision = row.contains("decision") ? parse_decision(row["decision"], line) : 0;
        validate_score_row(p.probs, ScoreKind::Probs, line);
        if (!(p.score >= 0.0 && p.score <= 1.0)) throw ValidationError("score outside [0, 1]", line);
        out.push_back(std::move(p));
    }
    return out;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace mgte::cli
