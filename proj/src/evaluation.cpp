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

#include "mgte/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "mgte/ensemble.hpp"
#include "mgte/errors.hpp"
#include "mgte/simd/kernels.hpp"

namespace mgte {

namespace {

struct GeneratorColumn {
    std::string_view id;
    std::string_view title;
};

// Report column order for the known generators.
constexpr std::array<GeneratorColumn, 11> kGeneratorColumns{{
    {"chatgpt", "Chat GPT"},
    {"gpt4", "GPT-4"},
    {"gpt3", "GPT-3"},
    {"gpt2", "GPT-2"},
    {"mistral", "Mistral"},
    {"mistral-chat", "Mistral-Chat"},
    {"cohere", "Cohere"},
    {"cohere-chat", "Cohere-Chat"},
    {"llama-chat", "Llama-Chat"},
    {"mpt", "MPT"},
    {"mpt-chat", "MPT-Chat"},
}};

constexpr std::string_view kUndefined = "\xE2\x80\x94";  // em dash

std::size_t generator_rank(std::string_view generator) {
    for (std::size_t i = 0; i < kGeneratorColumns.size(); ++i) {
        if (kGeneratorColumns[i].id == generator) return i;
    }
    return kGeneratorColumns.size();
}

bool generator_before(std::string_view a, std::string_view b) {
    const std::size_t ra = generator_rank(a);
    const std::size_t rb = generator_rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string format_tpr(const std::optional<double>& tpr) {
    if (!tpr) return std::string(kUndefined);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *tpr);
    return buf;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string_view axis_value(const SampleMeta& m, StratumAxis axis) {
    switch (axis) {
        case StratumAxis::Generator:
        case StratumAxis::GeneratorDomain: return m.generator;
        case StratumAxis::Domain: return m.domain;
        case StratumAxis::Attack: return m.attack;
    }
    return {};
}

StratumKey key_for(const SampleMeta& m, StratumAxis axis) {
    StratumKey key{axis, std::string(axis_value(m, axis)), {}};
    if (axis == StratumAxis::GeneratorDomain) key.second = m.domain;
    return key;
}

/// Cells of one axis in presentation order.
std::vector<std::pair<const StratumKey*, const StratumCell*>> ordered_cells(const EvalReport& report,
                                                                            StratumAxis axis) {
    std::vector<std::pair<const StratumKey*, const StratumCell*>> out;
    for (const auto& [key, cell] : report.cells) {
        if (key.axis == axis) out.emplace_back(&key, &cell);
    }
    if (axis == StratumAxis::Generator || axis == StratumAxis::GeneratorDomain) {
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.first->value != b.first->value) return generator_before(a.first->value, b.first->value);
            return a.first->second < b.first->second;
        });
    }
    return out;
}

std::vector<StratumAxis> report_axes(const EvalReport& report) {
    std::vector<StratumAxis> axes = report.axes;
    for (const auto& [key, cell] : report.cells) {
        if (std::find(axes.begin(), axes.end(), key.axis) == axes.end()) axes.push_back(key.axis);
    }
    return axes;
}

std::vector<std::pair<std::string, std::string>> header_fields(const EvalReport& r) {
    std::vector<std::pair<std::string, std::string>> fields{
        {"detector", r.detector},
        {"threshold", format_real(r.threshold)},
        {"target_fpr", format_real(r.target_fpr)},
        {"achieved_fpr", format_real(r.achieved_fpr)},
        {"aggregation", r.aggregation},
        {"decision_rule", "score >= threshold"},
        {"n_human", std::to_string(r.n_human)},
        {"n_machine", std::to_string(r.n_machine)},
        {"aggregate_tpr", format_tpr(r.aggregate_tpr)},
    };
    fields.insert(fields.end(), r.metadata.begin(), r.metadata.end());
    return fields;
}

std::string column_title(const StratumKey& key) {
    switch (key.axis) {
        case StratumAxis::Generator: return generator_display_name(key.value);
        case StratumAxis::GeneratorDomain: return generator_display_name(key.value) + " / " + key.second;
        default: return key.value;
    }
}

std::string render_csv(const EvalReport& report) {
    std::ostringstream out;
    for (const auto& [k, v] : header_fields(report)) out << "# " << k << ": " << v << '\n';
    out << "stratum,n,tpr\n";
    for (StratumAxis axis : report_axes(report)) {
        for (const auto& [key, cell] : ordered_cells(report, axis)) {
            out << csv_field(key->label()) << ',' << cell->n << ',' << format_tpr(cell->tpr) << '\n';
        }
    }
    return out.str();
}

void render_markdown_table(std::ostringstream& out, const EvalReport& report,
                           std::span<const std::pair<const StratumKey*, const StratumCell*>> cells) {
    out << "| Detector |";
    for (const auto& [key, cell] : cells) out << ' ' << column_title(*key) << " |";
    out << " AGG TPR |\n|---|";
    for (std::size_t i = 0; i <= cells.size(); ++i) out << ":---:|";
    out << '\n';
    if (cells.empty()) return;
    out << "| " << report.detector << " |";
    for (const auto& [key, cell] : cells) out << ' ' << format_tpr(cell->tpr) << " |";
    out << ' ' << format_tpr(report.aggregate_tpr) << " |\n";
}

std::string render_markdown(const EvalReport& report) {
    std::ostringstream out;
    for (const auto& [k, v] : header_fields(report)) out << "<!-- " << k << ": " << v << " -->\n";
    const std::vector<StratumAxis> axes = report_axes(report);
    bool first = true;
    for (StratumAxis axis : axes) {
        const auto cells = ordered_cells(report, axis);
        if (cells.empty()) continue;
        out << '\n';
        render_markdown_table(out, report, cells);
        first = false;
    }
    if (first) {
        out << '\n';
        render_markdown_table(out, report, {});
    }
    return out.str();
}

}  // namespace

std::string_view to_string(StratumAxis axis) noexcept {
    switch (axis) {
        case StratumAxis::Generator: return "generator";
        case StratumAxis::Domain: return "domain";
        case StratumAxis::Attack: return "attack";
        case StratumAxis::GeneratorDomain: return "generator_domain";
    }
    return "unknown";
}

StratumAxis parse_stratum_axis(std::string_view text) {
    const std::string t = lower(text);
    if (t == "generator" || t == "model") return StratumAxis::Generator;
    if (t == "domain") return StratumAxis::Domain;
    if (t == "attack") return StratumAxis::Attack;
    if (t == "generator_domain" || t == "generator-domain" || t == "generator*domain" || t == "generatorxdomain" ||
        t == "generator\xC3\x97" "domain") {
        return StratumAxis::GeneratorDomain;
    }
    throw ConfigError("unknown report stratum axis '" + std::string(text) + "'");
}

std::vector<StratumAxis> parse_stratum_axes(std::string_view text) {
    std::vector<StratumAxis> axes;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const StratumAxis axis = parse_stratum_axis(text.substr(start, comma - start));
        if (std::find(axes.begin(), axes.end(), axis) != axes.end()) {
            throw ConfigError("stratum axis '" + std::string(to_string(axis)) + "' listed twice");
        }
        axes.push_back(axis);
        start = comma + 1;
    }
    return axes;
}

std::string StratumKey::label() const {
    std::string out(to_string(axis));
    out += ':';
    out += value;
    if (axis == StratumAxis::GeneratorDomain) {
        out += '/';
        out += second;
    }
    return out;
}

ThresholdCalibration calibrate_threshold(std::span<const ScoredLabel> scores, double target_fpr) {
    if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
        throw ConfigError("target FPR must lie in (0, 1), got " + format_real(target_fpr));
    }
    std::vector<double> human;
    std::vector<double> candidates;
    candidates.reserve(scores.size() + 1);
    for (const ScoredLabel& s : scores) {
        if (!(s.score >= 0.0 && s.score <= 1.0)) {
            throw NumericInputError("calibration score " + format_real(s.score) + " outside [0, 1]");
        }
        candidates.push_back(s.score);
        if (s.label == Label::Human) human.push_back(s.score);
    }
    if (human.empty()) throw CalibrationError("no HUMAN-labeled samples to calibrate on");

    std::sort(human.begin(), human.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.push_back(kThresholdAboveAll);

    const auto n_human = static_cast<double>(human.size());
    auto fpr_at = [&](double t) {
        const auto above = static_cast<std::size_t>(human.end() - std::lower_bound(human.begin(), human.end(), t));
        return static_cast<double>(above) / n_human;
    };

    // FPR is non-increasing in t and feasible at the top candidate, so binary
    // search for the first feasible candidate.
    const auto it = std::partition_point(candidates.begin(), candidates.end(),
                                         [&](double t) { return !(fpr_at(t) <= target_fpr); });
    return ThresholdCalibration{*it, fpr_at(*it), human.size()};
}

EvalReport evaluate(std::span<const EnsemblePrediction> predictions, const MetaMap& meta, double threshold,
                    std::span<const StratumAxis> axes, double target_fpr) {
    if (!(threshold >= 0.0 && threshold <= kThresholdAboveAll)) {
        throw ConfigError("threshold must lie in [0, 1], got " + format_real(threshold));
    }
    EvalReport report;
    report.threshold = threshold;
    report.target_fpr = target_fpr;
    report.axes.assign(axes.begin(), axes.end());

    std::vector<const SampleMeta*> rows;
    rows.reserve(predictions.size());
    for (const EnsemblePrediction& p : predictions) {
        auto it = meta.find(p.sample_id);
        if (it == meta.end()) throw LabelingError("prediction for unknown sample '" + p.sample_id + "'");
        rows.push_back(&it->second);
    }

    // Observed vocabulary per axis. Generators come from MACHINE rows only;
    // "human" is the negative class, not a stratum.
    std::set<std::string, std::less<>> generators;
    std::set<std::string, std::less<>> domains;
    std::set<std::string, std::less<>> attacks;
    for (const SampleMeta* m : rows) {
        if (m->label() == Label::Machine) generators.insert(m->generator);
        domains.insert(m->domain);
        attacks.insert(m->attack);
    }

    std::map<StratumKey, std::vector<double>> machine_scores;
    for (StratumAxis axis : axes) {
        switch (axis) {
            case StratumAxis::Generator:
                for (const auto& g : generators) machine_scores[{axis, g, {}}];
                break;
            case StratumAxis::Domain:
                for (const auto& d : domains) machine_scores[{axis, d, {}}];
                break;
            case StratumAxis::Attack:
                for (const auto& a : attacks) machine_scores[{axis, a, {}}];
                break;
            case StratumAxis::GeneratorDomain:
                for (const auto& g : generators) {
                    for (const auto& d : domains) machine_scores[{axis, g, d}];
                }
                break;
        }
    }

    std::vector<double> all_machine;
    std::vector<double> all_human;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double score = predictions[i].score;
        if (rows[i]->label() == Label::Human) {
            all_human.push_back(score);
            continue;
        }
        all_machine.push_back(score);
        for (StratumAxis axis : axes) machine_scores[key_for(*rows[i], axis)].push_back(score);
    }

    const simd::KernelTable& kernels = simd::active_kernels();
    for (auto& [key, scores] : machine_scores) {
        StratumCell cell;
        cell.n = scores.size();
        cell.true_positives = kernels.count_at_least(scores, threshold);
        if (cell.n > 0) cell.tpr = static_cast<double>(cell.true_positives) / static_cast<double>(cell.n);
        report.cells.emplace(key, cell);
    }

    report.n_machine = all_machine.size();
    report.n_human = all_human.size();
    if (!all_machine.empty()) {
        report.aggregate_tpr = static_cast<double>(kernels.count_at_least(all_machine, threshold)) /
                               static_cast<double>(all_machine.size());
    }
    report.achieved_fpr = all_human.empty() ? 0.0
                                            : static_cast<double>(kernels.count_at_least(all_human, threshold)) /
                                                  static_cast<double>(all_human.size());
    return report;
}

ReportFormat parse_report_format(std::string_view text) {
    const std::string t = lower(text);
    if (t == "csv") return ReportFormat::Csv;
    if (t == "markdown" || t == "md") return ReportFormat::Markdown;
    throw ConfigError("unknown report format '" + std::string(text) + "' (expected csv or markdown)");
}

std::string generator_display_name(std::string_view generator) {
    const std::size_t r = generator_rank(generator);
    return r < kGeneratorColumns.size() ? std::string(kGeneratorColumns[r].title) : std::string(generator);
}

std::string render_report(const EvalReport& report, ReportFormat format) {
    return format == ReportFormat::Csv ? render_csv(report) : render_markdown(report);
}

std::string format_real(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

}  // namespace mgte
