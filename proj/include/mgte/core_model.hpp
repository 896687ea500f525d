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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mgte {

/// Binary ground truth. The enumerator value doubles as the class index into
/// score vectors, so MACHINE probability lives at index 1.
enum class Label : std::uint8_t { Human = 0, Machine = 1 };

constexpr std::size_t class_index(Label label) noexcept { return static_cast<std::size_t>(label); }
inline constexpr std::size_t kMachineClass = class_index(Label::Machine);

std::string_view to_string(Label label) noexcept;

inline constexpr std::string_view kHumanGenerator = "human";

struct SampleMeta {
    std::string id;
    std::optional<std::string> source_id;  // adversarial rows point at their clean source
    std::string generator;                 // "human" or a generator model name, lower-cased
    std::string domain;
    std::string attack;                    // "none" for non-adversarial rows
    std::string decoding;

    Label label() const noexcept { return generator == kHumanGenerator ? Label::Human : Label::Machine; }
};

using LabelMap = std::unordered_map<std::string, Label>;

enum class ScoreKind : std::uint8_t { Logits, Probs };

std::string_view to_string(ScoreKind kind) noexcept;
/// Accepts "LOGITS"/"PROBS" in any case.
ScoreKind parse_score_kind(std::string_view text);

inline constexpr double kProbSumTolerance = 1e-6;

/// Throws ValidationError (tagged with `line`) if `row` is not a valid score
/// vector of the given kind: non-finite entries always fail, PROBS rows must
/// lie in [0,1] and sum to 1 within kProbSumTolerance.
void validate_score_row(std::span<const double> row, ScoreKind kind, std::size_t line = 0);

/// One detector's per-sample class scores. Rows are stored flat, row-major,
/// K values per row. The constructor enforces every invariant, so a
/// ModelScores that exists is valid.
class ModelScores {
public:
    ModelScores(std::string model_id, ScoreKind kind, std::vector<std::string> sample_ids,
                std::vector<double> values, std::size_t num_classes);

    const std::string& model_id() const noexcept { return model_id_; }
    ScoreKind kind() const noexcept { return kind_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t size() const noexcept { return sample_ids_.size(); }

    const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(values_).subspan(i * num_classes_, num_classes_);
    }

private:
    std::string model_id_;
    ScoreKind kind_;
    std::size_t num_classes_;
    std::vector<std::string> sample_ids_;
    std::vector<double> values_;
};

struct Perplexity {
    std::string model_id;
    double value = 1.0;
    std::size_t n_samples = 0;
};

struct WeightEntry {
    std::string model_id;
    double weight = 0.0;
    double perplexity = 0.0;  // source perplexity, 0 when unknown
    bool floored = false;     // P - 1 was raised to the floor
};

/// Normalized ensemble weights, in member order.
class WeightVector {
public:
    static constexpr double kSumTolerance = 1e-9;

    explicit WeightVector(std::vector<WeightEntry> entries);

    const std::vector<WeightEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const WeightEntry& operator[](std::size_t i) const noexcept { return entries_[i]; }
    std::optional<std::size_t> find(std::string_view model_id) const noexcept;
    bool any_floored() const noexcept;

private:
    std::vector<WeightEntry> entries_;
};

struct EnsemblePrediction {
    std::string sample_id;
    std::vector<double> probs;
    std::size_t decision = 0;  // argmax class, ties toward the lower index
    double score = 0.0;        // probability of the MACHINE class
};

enum class AlignMode : std::uint8_t { Strict, Intersect };

AlignMode parse_align_mode(std::string_view text);
std::string_view to_string(AlignMode mode) noexcept;

/// Scores of several models over one common, lexicographically ordered set of
/// samples. Storage is model-major: slab(m) holds samples x K for model m, so
/// the (sample, model, class) entry is slab(m)[sample * K + class].
struct AlignedScores {
    std::vector<std::string> sample_ids;
    std::vector<Label> labels;
    std::vector<std::string> model_ids;
    std::vector<ScoreKind> kinds;
    std::size_t num_classes = 0;
    std::vector<std::vector<double>> slabs;
    std::vector<std::string> dropped_ids;  // INTERSECT only: union minus intersection

    std::size_t num_samples() const noexcept { return sample_ids.size(); }
    std::size_t num_models() const noexcept { return model_ids.size(); }

    std::span<const double> slab(std::size_t model) const noexcept { return slabs[model]; }
    std::span<const double> row(std::size_t model, std::size_t sample) const noexcept {
        return slab(model).subspan(sample * num_classes, num_classes);
    }
    double at(std::size_t sample, std::size_t model, std::size_t cls) const noexcept {
        return slabs[model][sample * num_classes + cls];
    }

    ModelScores model(std::size_t m) const;
    AlignedScores subset(std::span<const std::size_t> rows) const;
    /// Copy with every LOGITS member converted to probabilities by softmax.
    AlignedScores to_probabilities() const;
};

/// Brings several score sets onto one sample axis. STRICT requires identical
/// id sets; INTERSECT keeps the common subset and records what it dropped.
/// Every kept id must have a label.
AlignedScores align(std::span<const ModelScores> scores, const LabelMap& labels, AlignMode mode);

/// Unlabeled variant: `labels` of the result is left empty.
AlignedScores align(std::span<const ModelScores> scores, AlignMode mode);

}  // namespace mgte
