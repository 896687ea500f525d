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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mgte/batching.hpp"
#include "mgte/cli.hpp"
#include "mgte/dataio.hpp"
#include "mgte/ensemble.hpp"
#include "mgte/evaluation.hpp"
#include "mgte/perplexity.hpp"
#include "mgte/sampling.hpp"
#include "mgte/weighting.hpp"
#include "oracles.hpp"
#include "row_report.hpp"
#include "test_support.hpp"

namespace {

using namespace mgte;
using Clock = std::chrono::steady_clock;
using mgte::testing::binary_probs;
using mgte::testing::make_ids;

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome perplexity_oracle() {
    Outcome o;
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    const auto start = Clock::now();
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + rng() % 1000;
        std::vector<double> machine(n), truth(n);
        std::vector<Label> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            machine[i] = unit(rng);
            labels[i] = rng() % 2 ? Label::Machine : Label::Human;
            truth[i] = labels[i] == Label::Machine ? machine[i] : 1.0 - machine[i];
        }
        const double got = compute_perplexity(binary_probs("m", make_ids(n), machine), labels).value;
        const long double want = oracle::perplexity(truth, kDefaultClampEps);
        worst = std::max(worst, static_cast<double>(std::abs((got - want) / want)));
    }
    const double elapsed = seconds_since(start);
    o.check(worst <= 1e-10, "max relative error " + std::to_string(worst));
    o.check(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
    if (o.pass) o.detail = "max rel err " + std::to_string(worst) + ", " + std::to_string(elapsed) + " s";
    return o;
}

Outcome perplexity_hand_checks() {
    Outcome o;
    const std::vector<Label> mm{Label::Machine, Label::Machine};
    const double perfect = compute_perplexity(binary_probs("m", {"a", "b"}, {1.0, 1.0}), mm).value;
    const double uniform = compute_perplexity(binary_probs("m", {"a", "b"}, {0.5, 0.5}), mm).value;
    const double mixed = compute_perplexity(binary_probs("m", {"a", "b"}, {0.8, 0.6}), mm).value;
    o.check(std::abs(perfect - 1.0) <= 1e-9, "perfect predictions gave " + format_real(perfect));
    o.check(std::abs(uniform - 2.0) <= 1e-9, "uniform predictions gave " + format_real(uniform));
    o.check(std::abs(mixed - 1.4433756729740644) <= 1e-9, "(0.8, 0.6) gave " + format_real(mixed));
    return o;
}

std::vector<Perplexity> as_perplexities(const std::vector<double>& p) {
    std::vector<Perplexity> out;
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back({"m" + std::to_string(i), p[i], 1});
    return out;
}

Outcome weight_suite() {
    Outcome o;
    const WeightVector two = compute_weights(as_perplexities({2.0, 3.0}));
    o.check(std::abs(two[0].weight - 2.0 / 3.0) <= 1e-15 && std::abs(two[1].weight - 1.0 / 3.0) <= 1e-15,
            "(2, 3) did not give (2/3, 1/3)");

    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> excess(0.0, 5.0);
    for (int t = 0; t < 1000 && o.pass; ++t) {
        std::vector<double> p(1 + rng() % 16);
        for (double& x : p) x = rng() % 8 == 0 ? 1.0 : 1.0 + excess(rng);
        const WeightVector w = compute_weights(as_perplexities(p));
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            o.check(std::isfinite(w[i].weight) && w[i].weight >= 0.0, "non-finite or negative weight");
            sum += w[i].weight;
            for (std::size_t j = 0; j < p.size(); ++j) {
                if (p[i] < p[j]) o.check(w[i].weight >= w[j].weight, "lower perplexity got a smaller weight");
            }
        }
        o.check(std::abs(sum - 1.0) <= 1e-9, "weights do not sum to 1");
    }

    const WeightVector floored = compute_weights(as_perplexities({1.0, 2.0}));
    o.check(std::isfinite(floored[0].weight) && floored[0].floored &&
                std::abs(floored[0].weight + floored[1].weight - 1.0) <= 1e-12,
            "P = 1 did not produce finite normalized weights");
    return o;
}

Outcome ensemble_suite() {
    Outcome o;
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 1000 && o.pass; ++t) {
        const std::size_t m = 1 + rng() % 6, n = 1 + rng() % 20;
        const auto ids = make_ids(n);
        std::vector<ModelScores> members;
        std::vector<WeightEntry> w;
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> p(n);
            for (double& x : p) x = unit(rng);
            members.push_back(binary_probs("m" + std::to_string(i), ids, p));
            w.push_back({"m" + std::to_string(i), unit(rng), 0.0, false});
            total += w.back().weight;
        }
        for (auto& e : w) e.weight /= total;
        const AlignedScores aligned = align(members, AlignMode::Strict);
        const auto preds = soft_vote(WeightVector(w), aligned);
        for (std::size_t s = 0; s < n; ++s) {
            double lo = 1.0, hi = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                lo = std::min(lo, aligned.at(s, i, 1));
                hi = std::max(hi, aligned.at(s, i, 1));
            }
            o.check(preds[s].score >= lo - 1e-15 && preds[s].score <= hi + 1e-15, "ensemble left member bounds");
            o.check(std::abs(preds[s].probs[0] + preds[s].probs[1] - 1.0) <= 1e-12, "ensemble row not normalized");
        }
        std::vector<WeightEntry> hot = w;
        const std::size_t k = rng() % m;
        for (std::size_t i = 0; i < m; ++i) hot[i].weight = i == k ? 1.0 : 0.0;
        const auto picked = soft_vote(WeightVector(hot), aligned);
        for (std::size_t s = 0; s < n; ++s) {
            o.check(picked[s].probs[0] == aligned.at(s, k, 0) && picked[s].probs[1] == aligned.at(s, k, 1),
                    "one-hot weights did not reproduce the member");
        }
    }
    const std::vector<ModelScores> pair{binary_probs("a", {"x"}, {0.9}), binary_probs("b", {"x"}, {0.6})};
    const auto v = soft_vote(WeightVector({{"a", 2.0 / 3.0, 0, false}, {"b", 1.0 / 3.0, 0, false}}),
                             align(pair, AlignMode::Strict));
    o.check(std::abs(v[0].score - 0.8) <= 1e-12, "(2/3, 1/3) x (0.9, 0.6) gave " + format_real(v[0].score));
    return o;
}

Outcome calibration_oracle() {
    Outcome o;
    std::mt19937_64 rng(1004);
    for (int t = 0; t < 200 && o.pass; ++t) {
        const std::size_t n = 1 + rng() % 200;
        const int grid = 2 + static_cast<int>(rng() % 100);
        std::vector<double> scores(n);
        std::vector<bool> machine(n);
        std::vector<ScoredLabel> sl(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng() % (grid + 1)) / grid;
            machine[i] = i != 0 && rng() % 3 != 0;
            sl[i] = {scores[i], machine[i] ? Label::Machine : Label::Human};
        }
        const double target = std::uniform_real_distribution<double>(0.001, 0.5)(rng);
        const auto got = calibrate_threshold(sl, target);
        const auto want = oracle::exhaustive_calibration(scores, machine, target);
        std::size_t tp = 0, m = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!machine[i]) continue;
            ++m;
            tp += scores[i] >= got.threshold;
        }
        const bool same_tpr = m == 0 || static_cast<double>(tp) / static_cast<double>(m) == want.tpr;
        o.check(same_tpr && got.threshold == want.threshold, "instance " + std::to_string(t) + " differs from scan");
        o.check(got.achieved_fpr <= target, "achieved FPR above target on instance " + std::to_string(t));
    }
    return o;
}

Outcome report_golden() {
    Outcome o;
    const std::string golden = dataio::read_file(mgte::testing::data_dir() / "generator_row.golden.md");
    const std::string rendered = render_report(mgte::testing::reference_row_report(), ReportFormat::Markdown);
    o.check(rendered == golden, "rendered markdown differs from golden file");
    return o;
}

MetaMap generator_fixture(const std::map<std::string, std::size_t>& sizes, std::size_t domains) {
    MetaMap m;
    for (const auto& [gen, n] : sizes) {
        for (std::size_t i = 0; i < n; ++i) {
            std::string id = gen + "-" + std::to_string(i);
            m.emplace(id, SampleMeta{id, std::nullopt, gen, "d" + std::to_string(i % domains), "none", "greedy"});
        }
    }
    return m;
}

Outcome subsampler() {
    Outcome o;
    std::mt19937_64 rng(1005);
    for (int t = 0; t < 100 && o.pass; ++t) {
        std::map<std::string, std::size_t> sizes;
        for (std::size_t g = 0; g < 1 + rng() % 8; ++g) sizes["g" + std::to_string(g)] = 1 + rng() % 400;
        dataio::SubsampleSpec spec;
        spec.fraction = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        spec.seed = rng();
        const MetaMap meta = generator_fixture(sizes, 1 + rng() % 5);
        const auto r = dataio::subsample(meta, spec);
        for (const auto& row : r.manifest) {
            o.check(std::abs(static_cast<double>(row.selected) - spec.fraction * static_cast<double>(row.total)) <= 1.0,
                    "stratum " + row.stratum + " outside the +-1 bound");
        }
        o.check(dataio::subsample(meta, spec).selected == r.selected, "second run differs");
    }

    // 100k rows under two seconds.
    std::map<std::string, std::size_t> big;
    for (int g = 0; g < 10; ++g) big["gen" + std::to_string(g)] = 10000;
    const MetaMap large = generator_fixture(big, 8);
    dataio::SubsampleSpec spec;
    const auto start = Clock::now();
    const auto r = dataio::subsample(large, spec);
    const double elapsed = seconds_since(start);
    o.check(elapsed < 2.0, "100k rows took " + std::to_string(elapsed) + " s");
    o.check(r.selected.size() == 10000, "100k rows at 0.1 kept " + std::to_string(r.selected.size()));

    // 2:1 generator ratio, preserved stratum by stratum.
    const MetaMap ratio = generator_fixture({{"gpt2", 68183}, {"chatgpt", 34090}}, 8);
    dataio::SubsampleSpec rs;
    rs.axes = {dataio::SubsampleAxis::Generator, dataio::SubsampleAxis::Domain};
    const auto rr = dataio::subsample(ratio, rs);
    std::map<std::string, std::size_t> per_gen;
    for (const auto& row : rr.manifest) {
        o.check(std::abs(static_cast<double>(row.selected) - 0.1 * static_cast<double>(row.total)) <= 1.0,
                "ratio fixture stratum " + row.stratum + " outside the +-1 bound");
        per_gen[row.stratum.substr(0, row.stratum.find('|'))] += row.selected;
    }
    const double ratio_out = static_cast<double>(per_gen["gpt2"]) / static_cast<double>(per_gen["chatgpt"]);
    o.check(std::abs(ratio_out - 68183.0 / 34090.0) < 1e-3, "generator ratio drifted to " + format_real(ratio_out));
    if (o.pass) o.detail = "100k rows in " + std::to_string(elapsed) + " s";
    return o;
}

Outcome batch_dominance() {
    Outcome o;
    std::mt19937_64 rng(1006);
    for (int t = 0; t < 1000 && o.pass; ++t) {
        const std::size_t n = rng() % 200;
        const std::size_t bs = 1 + rng() % 16;
        std::vector<std::uint32_t> counts(n);
        for (auto& c : counts) c = static_cast<std::uint32_t>(rng() % 2000);
        const auto sorted = dataio::padding_cost(dataio::plan_batches(counts, bs), counts);
        const auto natural = dataio::padding_cost(dataio::natural_plan(n, bs), counts);
        o.check(sorted <= natural, "sorted cost " + std::to_string(sorted) + " > natural " + std::to_string(natural));
    }
    const std::vector<std::uint32_t> hand{1, 5};
    o.check(dataio::padding_cost(dataio::natural_plan(2, 2), hand) == 4, "(1, 5) did not cost 4");
    return o;
}

Outcome end_to_end_determinism() {
    Outcome o;
    mgte::testing::TempDir a("accept_a"), b("accept_b");
    const auto d = mgte::testing::data_dir();
    auto args = [&](const std::filesystem::path& out) {
        return std::vector<std::string>{"run", "--dataset", (d / "pipeline.csv").string(), "--calibration-ids",
                                        (d / "pipeline_calibration_ids.txt").string(), "--strata",
                                        "generator,domain,attack,generator_domain", "--out-dir", out.string(),
                                        "--scores", (d / "pipeline_a.jsonl").string(),
                                        (d / "pipeline_b.jsonl").string()};
    };
    std::ostringstream sink;
    o.check(cli::run(args(a.path()), sink, sink) == cli::kExitOk, "first run failed: " + sink.str());
    o.check(cli::run(args(b.path()), sink, sink) == cli::kExitOk, "second run failed: " + sink.str());
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
        ++files;
        const auto other = b.path() / entry.path().filename();
        o.check(std::filesystem::exists(other) &&
                    dataio::read_file(entry.path()) == dataio::read_file(other),
                entry.path().filename().string() + " differs between runs");
    }
    o.check(files == 6, "expected 6 output files, found " + std::to_string(files));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"perplexity-oracle", perplexity_oracle},
        {"perplexity-hand-checks", perplexity_hand_checks},
        {"weight-suite", weight_suite},
        {"ensemble-suite", ensemble_suite},
        {"calibration-oracle", calibration_oracle},
        {"report-golden", report_golden},
        {"subsampler", subsampler},
        {"batch-plan-dominance", batch_dominance},
        {"end-to-end-determinism", end_to_end_determinism},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name;
        if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
        std::cout << '\n';
        failures += !o.pass;
    }
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << '\n';
    return failures == 0 ? 0 : 1;
}
