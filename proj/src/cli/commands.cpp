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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>

#include "mgte/batching.hpp"
#include "mgte/cli.hpp"
#include "mgte/dataio.hpp"
#include "mgte/ensemble.hpp"
#include "mgte/errors.hpp"
#include "mgte/evaluation.hpp"
#include "mgte/perplexity.hpp"
#include "mgte/sampling.hpp"
#include "mgte/weighting.hpp"
#include "outputs.hpp"

namespace mgte::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kDefaultReportStrata = "generator";
constexpr std::string_view kDefaultSubsampleStrata = "generator,domain,attack,decoding";

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

void check_ranges(const RunConfig& c) {
    require(c.target_fpr > 0.0 && c.target_fpr < 1.0, "--target-fpr must lie in (0, 1)");
    require(c.clamp_eps > 0.0 && c.clamp_eps < 1.0, "--clamp-eps must lie in (0, 1)");
    require(c.floor_eps > 0.0 && std::isfinite(c.floor_eps), "--floor-eps must be positive");
    require(c.fraction > 0.0 && c.fraction <= 1.0, "--fraction must lie in (0, 1]");
    require(c.batch_size >= 1, "--batch-size must be at least 1");
    if (c.threshold) require(*c.threshold >= 0.0 && *c.threshold <= 1.0, "--threshold must lie in [0, 1]");
    require(c.format == "csv" || c.format == "markdown" || c.format == "both",
            "--format must be csv, markdown or both");
}

// Writes `contents` to out_dir/name, or to `out` when no --out-dir was given.
void emit(const RunConfig& c, std::ostream& out, std::string_view name, const std::string& contents) {
    if (c.out_dir.empty()) {
        out << contents;
        return;
    }
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + c.out_dir + "': " + ec.message());
    const fs::path path = fs::path(c.out_dir) / name;
    dataio::write_file_atomic(path, contents);
    out << "wrote " << path.string() << '\n';
}

dataio::Dataset load_dataset(const RunConfig& c) {
    require(!c.dataset.empty(), "--dataset is required");
    const auto format = c.dataset_format.empty() ? dataio::infer_dataset_format(c.dataset)
                                                 : dataio::parse_dataset_format(c.dataset_format);
    return dataio::load_dataset(c.dataset, format);
}

std::vector<ModelScores> load_all_scores(const RunConfig& c) {
    require(!c.scores.empty(), "at least one --scores file is required");
    std::vector<ModelScores> out;
    out.reserve(c.scores.size());
    for (const std::string& path : c.scores) {
        try {
            out.push_back(dataio::load_scores(path));
        } catch (const IoError&) {
            throw;
        } catch (const UserError& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }
    return out;
}

std::vector<EnsemblePrediction> load_predictions(const RunConfig& c) {
    require(!c.predictions.empty(), "--predictions is required");
    std::ifstream in(c.predictions, std::ios::binary);
    if (!in) throw IoError("cannot open predictions file '" + c.predictions + "'");
    return parse_predictions_jsonl(in);
}

std::vector<StratumAxis> report_axes(const RunConfig& c) {
    return parse_stratum_axes(c.strata.empty() ? kDefaultReportStrata : std::string_view(c.strata));
}

/// Rows of `sorted_ids` named in `ids`. Unknown ids are an error under STRICT
/// alignment and are counted and skipped under INTERSECT.
struct RowSelection {
    std::vector<std::size_t> rows;
    std::size_t unknown = 0;
};

RowSelection select_rows(const std::vector<std::string>& sorted_ids, const std::vector<std::string>& ids,
                         AlignMode mode, std::string_view what) {
    RowSelection sel;
    std::vector<std::string> unknown;
    for (const std::string& id : ids) {
        const auto it = std::lower_bound(sorted_ids.begin(), sorted_ids.end(), id);
        if (it == sorted_ids.end() || *it != id) {
            unknown.push_back(id);
            continue;
        }
        sel.rows.push_back(static_cast<std::size_t>(it - sorted_ids.begin()));
    }
    std::sort(sel.rows.begin(), sel.rows.end());
    sel.rows.erase(std::unique(sel.rows.begin(), sel.rows.end()), sel.rows.end());
    if (!unknown.empty() && mode == AlignMode::Strict) {
        throw ConfigError(std::to_string(unknown.size()) + " " + std::string(what) + " id(s) have no scores, first: '" +
                          unknown.front() + "'");
    }
    sel.unknown = unknown.size();
    return sel;
}

struct Split {
    std::vector<std::size_t> calibration;
    std::vector<std::size_t> evaluation;
    std::size_t unknown_ids = 0;
    bool overlap = false;
};

/// Calibration rows come from --calibration-ids. Evaluation rows come from
/// --eval-ids when given, otherwise everything outside the calibration split
/// (everything, with --allow-overlap).
Split resolve_split(const std::vector<std::string>& sorted_ids, const RunConfig& c, AlignMode mode) {
    require(!c.calibration_ids.empty(), "--calibration-ids is required");
    Split split;
    const RowSelection calib = select_rows(sorted_ids, dataio::load_id_list(c.calibration_ids), mode, "calibration");
    require(!calib.rows.empty(), "calibration split is empty");
    split.calibration = calib.rows;
    split.unknown_ids = calib.unknown;

    std::vector<bool> in_calib(sorted_ids.size(), false);
    for (std::size_t r : split.calibration) in_calib[r] = true;

    if (!c.eval_ids.empty()) {
        const RowSelection eval = select_rows(sorted_ids, dataio::load_id_list(c.eval_ids), mode, "evaluation");
        split.unknown_ids += eval.unknown;
        split.evaluation = eval.rows;
        const auto shared = static_cast<std::size_t>(std::count_if(
            split.evaluation.begin(), split.evaluation.end(), [&](std::size_t r) { return in_calib[r]; }));
        if (shared > 0 && !c.allow_overlap) {
            throw ConfigError("calibration and evaluation splits share " + std::to_string(shared) +
                              " sample(s); perplexities and the threshold would be fit on evaluation labels. "
                              "Pass --allow-overlap to accept this.");
        }
        split.overlap = shared > 0;
    } else {
        for (std::size_t r = 0; r < sorted_ids.size(); ++r) {
            if (!in_calib[r] || c.allow_overlap) split.evaluation.push_back(r);
        }
        split.overlap = c.allow_overlap;
    }
    require(!split.evaluation.empty(), "evaluation split is empty");
    return split;
}

std::vector<Perplexity> perplexities_of(const AlignedScores& calib, const RunConfig& c) {
    std::vector<Perplexity> out;
    out.reserve(calib.num_models());
    for (std::size_t m = 0; m < calib.num_models(); ++m) out.push_back(compute_perplexity(calib, m, c.clamp_eps));
    return out;
}

/// Aligned scores restricted to --calibration-ids when given, otherwise all of them.
AlignedScores perplexity_split(const RunConfig& c) {
    const dataio::Dataset ds = load_dataset(c);
    const auto scores = load_all_scores(c);
    const AlignMode mode = parse_align_mode(c.align);
    AlignedScores aligned = align(scores, ds.labels(), mode);
    if (c.calibration_ids.empty()) return aligned;
    const RowSelection sel =
        select_rows(aligned.sample_ids, dataio::load_id_list(c.calibration_ids), mode, "calibration");
    require(!sel.rows.empty(), "calibration split is empty");
    return aligned.subset(sel.rows);
}

std::vector<ScoredLabel> scored_labels(std::span<const EnsemblePrediction> preds, const MetaMap& meta) {
    std::vector<ScoredLabel> out;
    out.reserve(preds.size());
    for (const EnsemblePrediction& p : preds) {
        const auto it = meta.find(p.sample_id);
        if (it == meta.end()) throw LabelingError("prediction for unknown sample '" + p.sample_id + "'");
        out.push_back(ScoredLabel{p.score, it->second.label()});
    }
    return out;
}

std::vector<EnsemblePrediction> pick(std::span<const EnsemblePrediction> preds, std::span<const std::size_t> rows) {
    std::vector<EnsemblePrediction> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(preds[r]);
    return out;
}

void add_report_metadata(EvalReport& report, const RunConfig& c, const Split* split) {
    report.detector = c.detector;
    report.metadata.emplace_back("tool", "mgte " + std::string(tool_version()));
    if (split != nullptr) {
        report.metadata.emplace_back("calibration_samples", std::to_string(split->calibration.size()));
        report.metadata.emplace_back("evaluation_samples", std::to_string(split->evaluation.size()));
        report.metadata.emplace_back("split_overlap", split->overlap ? "allowed (--allow-overlap)" : "none");
        if (split->unknown_ids > 0) {
            report.metadata.emplace_back("unscored_split_ids", std::to_string(split->unknown_ids));
        }
    }
    report.metadata.emplace_back("config",
                                 config_json(c).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
}

void emit_report(const RunConfig& c, std::ostream& out, const EvalReport& report) {
    if (c.format == "csv" || c.format == "both") emit(c, out, "report.csv", render_report(report, ReportFormat::Csv));
    if (c.format == "markdown" || c.format == "both") {
        emit(c, out, "report.md", render_report(report, ReportFormat::Markdown));
    }
}

std::string header_comments(const RunConfig& c) {
    return "# tool: mgte " + std::string(tool_version()) + "\n# config: " +
           config_json(c).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

}  // namespace

void cmd_perplexity(const RunConfig& c, std::ostream& out) {
    const AlignedScores calib = perplexity_split(c);
    emit(c, out, "perplexity.json", dump(perplexity_document(perplexities_of(calib, c), c)));
}

void cmd_weights(const RunConfig& c, std::ostream& out) {
    const AlignedScores calib = perplexity_split(c);
    const auto perps = perplexities_of(calib, c);
    emit(c, out, "weights.json", dump(weights_document(compute_weights(perps, c.floor_eps), c)));
}

void cmd_vote(const RunConfig& c, std::ostream& out) {
    const auto scores = load_all_scores(c);
    const AlignMode mode = parse_align_mode(c.align);
    AlignedScores aligned;
    std::optional<WeightVector> weights;
    if (!c.weights.empty()) {
        weights = parse_weights_document(nlohmann::json::parse(dataio::read_file(c.weights), nullptr, false));
        aligned = align(scores, mode);
    } else {
        require(!c.calibration_ids.empty(), "vote needs --weights, or --dataset with --calibration-ids");
        const dataio::Dataset ds = load_dataset(c);
        aligned = align(scores, ds.labels(), mode);
        const RowSelection sel =
            select_rows(aligned.sample_ids, dataio::load_id_list(c.calibration_ids), mode, "calibration");
        require(!sel.rows.empty(), "calibration split is empty");
        weights = compute_weights(perplexities_of(aligned.subset(sel.rows), c), c.floor_eps);
    }
    const auto preds = soft_vote(*weights, aligned.to_probabilities());
    emit(c, out, "predictions.jsonl", predictions_jsonl(preds, c, std::nullopt));
}

void cmd_calibrate(const RunConfig& c, std::ostream& out) {
    const dataio::Dataset ds = load_dataset(c);
    auto preds = load_predictions(c);
    if (!c.calibration_ids.empty()) {
        const auto ids = dataio::load_id_list(c.calibration_ids);
        const std::unordered_set<std::string> keep(ids.begin(), ids.end());
        std::erase_if(preds, [&](const EnsemblePrediction& p) { return !keep.contains(p.sample_id); });
    }
    const ThresholdCalibration cal = calibrate_threshold(scored_labels(preds, ds.meta), c.target_fpr);
    emit(c, out, "threshold.json", dump(threshold_document(cal, c.target_fpr, c)));
}

void cmd_eval(const RunConfig& c, std::ostream& out) {
    const dataio::Dataset ds = load_dataset(c);
    auto preds = load_predictions(c);
    std::sort(preds.begin(), preds.end(),
              [](const EnsemblePrediction& a, const EnsemblePrediction& b) { return a.sample_id < b.sample_id; });
    std::vector<std::string> ids;
    ids.reserve(preds.size());
    for (const auto& p : preds) ids.push_back(p.sample_id);
    for (std::size_t i = 1; i < ids.size(); ++i) {
        if (ids[i] == ids[i - 1]) throw IntegrityError("duplicate prediction for '" + ids[i] + "'");
    }

    EvalReport report;
    const auto axes = report_axes(c);
    if (c.threshold) {
        std::vector<std::size_t> rows(preds.size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        if (!c.eval_ids.empty()) {
            rows = select_rows(ids, dataio::load_id_list(c.eval_ids), parse_align_mode(c.align), "evaluation").rows;
        }
        report = evaluate(pick(preds, rows), ds.meta, *c.threshold, axes, c.target_fpr);
        add_report_metadata(report, c, nullptr);
    } else {
        const Split split = resolve_split(ids, c, parse_align_mode(c.align));
        const ThresholdCalibration cal =
            calibrate_threshold(scored_labels(pick(preds, split.calibration), ds.meta), c.target_fpr);
        report = evaluate(pick(preds, split.evaluation), ds.meta, cal.threshold, axes, c.target_fpr);
        add_report_metadata(report, c, &split);
    }
    emit_report(c, out, report);
}

void cmd_run(const RunConfig& c, std::ostream& out) {
    require(!c.out_dir.empty(), "run needs --out-dir");
    const dataio::Dataset ds = load_dataset(c);
    const auto scores = load_all_scores(c);
    const AlignMode mode = parse_align_mode(c.align);
    const AlignedScores aligned = align(scores, ds.labels(), mode);
    const Split split = resolve_split(aligned.sample_ids, c, mode);
    const auto axes = report_axes(c);

    const auto perps = perplexities_of(aligned.subset(split.calibration), c);
    const WeightVector weights = compute_weights(perps, c.floor_eps);
    const auto preds = soft_vote(weights, aligned.to_probabilities());

    const auto calib_preds = pick(preds, split.calibration);
    const ThresholdCalibration cal = calibrate_threshold(scored_labels(calib_preds, ds.meta), c.target_fpr);
    const auto eval_preds = pick(preds, split.evaluation);
    EvalReport report = evaluate(eval_preds, ds.meta, cal.threshold, axes, c.target_fpr);
    add_report_metadata(report, c, &split);
    if (!aligned.dropped_ids.empty()) {
        report.metadata.emplace_back("alignment_dropped", std::to_string(aligned.dropped_ids.size()));
    }
    if (weights.any_floored()) report.metadata.emplace_back("weights_floored", "yes");

    emit(c, out, "perplexity.json", dump(perplexity_document(perps, c)));
    emit(c, out, "weights.json", dump(weights_document(weights, c)));
    emit(c, out, "threshold.json", dump(threshold_document(cal, c.target_fpr, c)));
    emit(c, out, "predictions.jsonl", predictions_jsonl(eval_preds, c, cal.threshold));
    emit_report(c, out, report);
}

void cmd_subsample(const RunConfig& c, std::ostream& out) {
    const dataio::Dataset ds = load_dataset(c);
    dataio::SubsampleSpec spec;
    spec.fraction = c.fraction;
    spec.seed = c.seed;
    spec.axes = dataio::parse_subsample_axes(c.strata.empty() ? kDefaultSubsampleStrata : std::string_view(c.strata));
    const auto result = dataio::subsample(ds.meta, spec);

    std::string ids = header_comments(c);
    for (const std::string& id : result.selected) ids += id + '\n';
    emit(c, out, "selected_ids.txt", ids);
    if (!c.out_dir.empty()) emit(c, out, "subsample_manifest.csv", header_comments(c) + dataio::render_manifest(result));
}

void cmd_batch_plan(const RunConfig& c, std::ostream& out) {
    std::vector<std::uint32_t> counts;
    if (!c.word_counts.empty()) {
        std::istringstream in(dataio::read_file(c.word_counts));
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (line.empty() || line[0] == '#') continue;
            try {
                std::size_t used = 0;
                const unsigned long v = std::stoul(line, &used);
                if (line.find_first_not_of(" \t\r", used) != std::string::npos || v > UINT32_MAX) throw std::exception();
                counts.push_back(static_cast<std::uint32_t>(v));
            } catch (const std::exception&) {
                throw ConfigError("word count on line " + std::to_string(n) + " is not a non-negative integer");
            }
        }
    } else {
        const dataio::Dataset ds = load_dataset(c);
        require(!ds.texts.empty() || ds.row_count() == 0, "dataset has no generation column; pass --word-counts");
        counts.reserve(ds.row_count());
        for (const std::string& id : ds.file_order) counts.push_back(dataio::word_count(ds.texts.at(id)));
    }
    const auto plan = dataio::plan_batches(counts, c.batch_size);
    emit(c, out, "batch_plan.json", dump(batch_plan_document(plan, counts, c)));
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Inverse-perplexity weighted ensembles of machine-generated-text detectors, evaluated by TPR at a fixed FPR.",
                 "mgte"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    CLI::Option* threshold_opt = nullptr;
    std::string threshold_text;

    auto add_dataset = [&](CLI::App* s) {
        s->add_option("--dataset", c.dataset, "RAID-style dataset (CSV or JSON lines)");
        s->add_option("--dataset-format", c.dataset_format, "csv or jsonl (default: from extension)");
    };
    auto add_scores = [&](CLI::App* s) {
        s->add_option("--scores", c.scores, "Score file (repeatable, one per detector)")->take_all();
        s->add_option("--align", c.align, "strict or intersect")->capture_default_str();
    };
    auto add_split = [&](CLI::App* s) {
        s->add_option("--calibration-ids", c.calibration_ids, "Ids of the labeled calibration split, one per line");
    };
    auto add_eps = [&](CLI::App* s) {
        s->add_option("--clamp-eps", c.clamp_eps, "Probability floor before taking logs")->capture_default_str();
    };
    auto add_floor = [&](CLI::App* s) {
        s->add_option("--floor-eps", c.floor_eps, "Floor for P - 1 when weighting")->capture_default_str();
    };
    auto add_report = [&](CLI::App* s) {
        s->add_option("--target-fpr", c.target_fpr, "FPR the threshold is calibrated to")->capture_default_str();
        s->add_option("--strata", c.strata, "Report axes: generator,domain,attack,generator_domain")
            ->default_str(std::string(kDefaultReportStrata));
        s->add_option("--format", c.format, "csv, markdown or both")->capture_default_str();
        s->add_option("--eval-ids", c.eval_ids, "Ids of the evaluation split (default: all non-calibration ids)");
        s->add_flag("--allow-overlap", c.allow_overlap, "Permit calibration ids inside the evaluation split");
        s->add_option("--detector", c.detector, "Detector name shown in reports")->capture_default_str();
    };
    auto add_out = [&](CLI::App* s) { s->add_option("--out-dir", c.out_dir, "Output directory (default: stdout)"); };

    auto* perplexity = app.add_subcommand("perplexity", "Per-model perplexity over a labeled split");
    add_dataset(perplexity), add_scores(perplexity), add_split(perplexity), add_eps(perplexity), add_out(perplexity);

    auto* weights = app.add_subcommand("weights", "Inverse-perplexity ensemble weights");
    add_dataset(weights), add_scores(weights), add_split(weights), add_eps(weights), add_floor(weights),
        add_out(weights);

    auto* vote = app.add_subcommand("vote", "Weighted soft-vote predictions");
    add_dataset(vote), add_scores(vote), add_split(vote), add_eps(vote), add_floor(vote), add_out(vote);
    vote->add_option("--weights", c.weights, "weights.json from the weights subcommand");

    auto* calibrate = app.add_subcommand("calibrate", "Threshold at a target FPR");
    add_dataset(calibrate), add_split(calibrate), add_out(calibrate);
    calibrate->add_option("--predictions", c.predictions, "predictions.jsonl");
    calibrate->add_option("--target-fpr", c.target_fpr, "FPR the threshold is calibrated to")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Stratified TPR report");
    add_dataset(eval), add_split(eval), add_report(eval), add_out(eval);
    eval->add_option("--predictions", c.predictions, "predictions.jsonl");
    eval->add_option("--align", c.align, "strict or intersect")->capture_default_str();
    threshold_opt = eval->add_option("--threshold", threshold_text, "Fixed threshold (skips calibration)");

    auto* run_cmd = app.add_subcommand("run", "Full pipeline: perplexity, weights, vote, calibrate, eval");
    add_dataset(run_cmd), add_scores(run_cmd), add_split(run_cmd), add_eps(run_cmd), add_floor(run_cmd),
        add_report(run_cmd), add_out(run_cmd);

    auto* sub = app.add_subcommand("subsample", "Balanced stratified subsample");
    add_dataset(sub), add_out(sub);
    sub->add_option("--fraction", c.fraction, "Fraction kept per stratum")->capture_default_str();
    sub->add_option("--strata", c.strata, "Axes: generator,domain,attack,decoding")
        ->default_str(std::string(kDefaultSubsampleStrata));
    sub->add_option("--seed", c.seed, "Seed for all random draws")->capture_default_str();

    auto* plan = app.add_subcommand("batch-plan", "Length-sorted batching plan");
    add_dataset(plan), add_out(plan);
    plan->add_option("--word-counts", c.word_counts, "One word count per line (instead of --dataset)");
    plan->add_option("--batch-size", c.batch_size, "Samples per batch")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "mgte: " << e.what() << '\n';
        return kExitUser;
    }

    try {
        c.command = app.get_subcommands().front()->get_name();
        if (threshold_opt != nullptr && threshold_opt->count() > 0) {
            try {
                std::size_t used = 0;
                c.threshold = std::stod(threshold_text, &used);
                if (used != threshold_text.size()) throw std::invalid_argument("trailing text");
            } catch (const std::exception&) {
                throw ConfigError("--threshold is not a number: '" + threshold_text + "'");
            }
        }
        check_ranges(c);
        if (c.command == "perplexity") cmd_perplexity(c, out);
        else if (c.command == "weights") cmd_weights(c, out);
        else if (c.command == "vote") cmd_vote(c, out);
        else if (c.command == "calibrate") cmd_calibrate(c, out);
        else if (c.command == "eval") cmd_eval(c, out);
        else if (c.command == "run") cmd_run(c, out);
        else if (c.command == "subsample") cmd_subsample(c, out);
        else if (c.command == "batch-plan") cmd_batch_plan(c, out);
        return kExitOk;
    } catch (const UserError& e) {
        err << "mgte " << c.command << ": " << e.what() << '\n';
        return kExitUser;
    } catch (const std::exception& e) {
        err << "mgte " << c.command << ": internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace mgte::cli
