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

#include "mgte/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_set>

#include "mgte/errors.hpp"
#include "mgte/perplexity.hpp"

namespace mgte {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

// Error messages list at most this many ids.
constexpr std::size_t kMaxListedIds = 10;

std::string list_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < kMaxListedIds; ++i) {
        if (i > 0) out += ", ";
        out += ids[i];
    }
    if (ids.size() > kMaxListedIds) out += ", ... (" + std::to_string(ids.size() - kMaxListedIds) + " more)";
    return out;
}

}  // namespace

std::string_view to_string(Label label) noexcept { return label == Label::Human ? "HUMAN" : "MACHINE"; }

std::string_view to_string(ScoreKind kind) noexcept { return kind == ScoreKind::Logits ? "LOGITS" : "PROBS"; }

ScoreKind parse_score_kind(std::string_view text) {
    const std::string u = upper(text);
    if (u == "LOGITS") return ScoreKind::Logits;
    if (u == "PROBS") return ScoreKind::Probs;
    throw SchemaError("unknown score kind '" + std::string(text) + "' (expected LOGITS or PROBS)");
}

AlignMode parse_align_mode(std::string_view text) {
    const std::string u = upper(text);
    if (u == "STRICT") return AlignMode::Strict;
    if (u == "INTERSECT") return AlignMode::Intersect;
    throw ConfigError("unknown alignment mode '" + std::string(text) + "' (expected strict or intersect)");
}

std::string_view to_string(AlignMode mode) noexcept { return mode == AlignMode::Strict ? "strict" : "intersect"; }

void validate_score_row(std::span<const double> row, ScoreKind kind, std::size_t line) {
    for (double v : row) {
        if (!std::isfinite(v)) throw ValidationError("non-finite score entry", line);
    }
    if (kind != ScoreKind::Probs) return;
    double sum = 0.0;
    for (double v : row) {
        if (v < 0.0 || v > 1.0) throw ValidationError("probability outside [0,1]", line);
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
        throw ValidationError("probabilities sum to " + std::to_string(sum) + ", expected 1", line);
    }
}

ModelScores::ModelScores(std::string model_id, ScoreKind kind, std::vector<std::string> sample_ids,
                         std::vector<double> values, std::size_t num_classes)
    : model_id_(std::move(model_id)),
      kind_(kind),
      num_classes_(num_classes),
      sample_ids_(std::move(sample_ids)),
      values_(std::move(values)) {
    if (model_id_.empty()) throw SchemaError("empty model_id");
    if (num_classes_ < 2) throw SchemaError("score vectors need at least 2 classes");
    if (values_.size() != sample_ids_.size() * num_classes_) {
        throw SchemaError("score matrix size does not match " + std::to_string(sample_ids_.size()) + " rows x " +
                          std::to_string(num_classes_) + " classes");
    }
    std::unordered_set<std::string_view> seen;
    seen.reserve(sample_ids_.size());
    for (std::size_t i = 0; i < sample_ids_.size(); ++i) {
        if (!seen.insert(sample_ids_[i]).second) {
            throw IntegrityError("duplicate sample id '" + sample_ids_[i] + "' in scores of " + model_id_);
        }
        validate_score_row(row(i), kind_, 0);
    }
}

WeightVector::WeightVector(std::vector<WeightEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ConfigError("weight vector is empty");
    std::unordered_set<std::string_view> seen;
    double sum = 0.0;
    for (const WeightEntry& e : entries_) {
        if (!seen.insert(e.model_id).second) throw ConfigError("duplicate model_id '" + e.model_id + "' in weights");
        if (!std::isfinite(e.weight) || e.weight < 0.0) {
            throw ConfigError("weight of '" + e.model_id + "' is negative or non-finite");
        }
        sum += e.weight;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw ConfigError("weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

std::optional<std::size_t> WeightVector::find(std::string_view model_id) const noexcept {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].model_id == model_id) return i;
    }
    return std::nullopt;
}

bool WeightVector::any_floored() const noexcept {
    return std::any_of(entries_.begin(), entries_.end(), [](const WeightEntry& e) { return e.floored; });
}

ModelScores AlignedScores::model(std::size_t m) const {
    return ModelScores(model_ids[m], kinds[m], sample_ids, slabs[m], num_classes);
}

AlignedScores AlignedScores::subset(std::span<const std::size_t> rows) const {
    AlignedScores out;
    out.model_ids = model_ids;
    out.kinds = kinds;
    out.num_classes = num_classes;
    out.sample_ids.reserve(rows.size());
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        out.sample_ids.push_back(sample_ids[r]);
        if (!labels.empty()) out.labels.push_back(labels[r]);
    }
    out.slabs.resize(slabs.size());
    for (std::size_t m = 0; m < slabs.size(); ++m) {
        std::vector<double>& dst = out.slabs[m];
        dst.reserve(rows.size() * num_classes);
        for (std::size_t r : rows) {
            auto src = row(m, r);
            dst.insert(dst.end(), src.begin(), src.end());
        }
    }
    return out;
}

AlignedScores AlignedScores::to_probabilities() const {
    AlignedScores out = *this;
    for (std::size_t m = 0; m < out.slabs.size(); ++m) {
        if (out.kinds[m] != ScoreKind::Logits) continue;
        std::span<double> slab(out.slabs[m]);
        for (std::size_t s = 0; s < num_samples(); ++s) {
            auto r = slab.subspan(s * num_classes, num_classes);
            softmax_into(r, r);
        }
        out.kinds[m] = ScoreKind::Probs;
    }
    return out;
}

namespace {

AlignedScores align_impl(std::span<const ModelScores> scores, const LabelMap* labels, AlignMode mode) {
    if (scores.empty()) throw ConfigError("no score sets to align");
    const std::size_t k = scores.front().num_classes();
    std::set<std::string_view> model_names;
    for (const ModelScores& s : scores) {
        if (s.num_classes() != k) {
            throw SchemaError("model '" + s.model_id() + "' has " + std::to_string(s.num_classes()) +
                              " classes, expected " + std::to_string(k));
        }
        if (!model_names.insert(s.model_id()).second) {
            throw ConfigError("model_id '" + s.model_id() + "' supplied more than once");
        }
    }

    // Per-model id -> row index, and the union of ids.
    std::vector<std::unordered_map<std::string_view, std::size_t>> index(scores.size());
    std::set<std::string_view> all_ids;
    for (std::size_t m = 0; m < scores.size(); ++m) {
        const auto& ids = scores[m].sample_ids();
        index[m].reserve(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            index[m].emplace(ids[i], i);
            all_ids.insert(ids[i]);
        }
    }

    AlignedScores out;
    out.num_classes = k;
    std::vector<std::string> kept;
    for (std::string_view id : all_ids) {
        bool everywhere = true;
        for (const auto& idx : index) everywhere = everywhere && idx.contains(id);
        if (everywhere) {
            kept.emplace_back(id);
        } else {
            out.dropped_ids.emplace_back(id);
        }
    }

    if (mode == AlignMode::Strict && !out.dropped_ids.empty()) {
        std::string msg = "score sets cover different sample ids";
        for (std::size_t m = 0; m < scores.size(); ++m) {
            std::vector<std::string> missing;
            for (std::string_view id : all_ids) {
                if (!index[m].contains(id)) missing.emplace_back(id);
            }
            if (!missing.empty()) {
                msg += "; model '" + scores[m].model_id() + "' is missing " + std::to_string(missing.size()) +
                       " id(s): " + list_ids(missing);
            }
        }
        throw AlignmentError(msg);
    }

    std::vector<std::string> unlabeled;
    if (labels != nullptr) {
        out.labels.reserve(kept.size());
        for (const std::string& id : kept) {
            auto it = labels->find(id);
            if (it == labels->end()) {
                unlabeled.push_back(id);
            } else {
                out.labels.push_back(it->second);
            }
        }
    }
    if (!unlabeled.empty()) {
        throw LabelingError(std::to_string(unlabeled.size()) + " scored sample(s) have no label: " + list_ids(unlabeled));
    }

    out.slabs.resize(scores.size());
    for (std::size_t m = 0; m < scores.size(); ++m) {
        out.model_ids.push_back(scores[m].model_id());
        out.kinds.push_back(scores[m].kind());
        std::vector<double>& slab = out.slabs[m];
        slab.reserve(kept.size() * k);
        for (const std::string& id : kept) {
            auto src = scores[m].row(index[m].at(id));
            slab.insert(slab.end(), src.begin(), src.end());
        }
    }
    out.sample_ids = std::move(kept);
    return out;
}

}  // namespace

AlignedScores align(std::span<const ModelScores> scores, const LabelMap& labels, AlignMode mode) {
    return align_impl(scores, &labels, mode);
}

AlignedScores align(std::span<const ModelScores> scores, AlignMode mode) {
    return align_impl(scores, nullptr, mode);
}

}  // namespace mgte
