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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgte/core_model.hpp"
#include "mgte/evaluation.hpp"
#include "mgte/perplexity.hpp"
#include "mgte/weighting.hpp"

namespace mgte::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUser = 2;

std::string_view tool_version() noexcept;

/// Everything a subcommand may read. Unused fields keep their defaults; the
/// resolved config is embedded in every output file (out_dir excluded, so
/// reruns into different directories stay byte-identical).
struct RunConfig {
    std::string command;
    std::string dataset;
    std::string dataset_format;  // empty: inferred from the extension
    std::vector<std::string> scores;
    std::string calibration_ids;
    std::string eval_ids;
    std::string weights;
    std::string predictions;
    std::string word_counts;
    std::optional<double> threshold;
    double target_fpr = kDefaultTargetFpr;
    double clamp_eps = kDefaultClampEps;
    double floor_eps = kDefaultFloorEps;
    std::string align = "strict";
    std::string strata;  // empty: per-command default
    double fraction = 0.1;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string format = "both";
    std::size_t batch_size = 16;
    bool allow_overlap = false;
    std::string detector = "ensemble";
};

/// Parses `args` (without the program name) and runs the subcommand. Normal
/// output goes to `out`, diagnostics to `err`. Returns 0 on success, 2 for
/// user or validation errors, 1 for internal failures.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Subcommand entry points; throw UserError on bad input.
void cmd_perplexity(const RunConfig& config, std::ostream& out);
void cmd_weights(const RunConfig& config, std::ostream& out);
void cmd_vote(const RunConfig& config, std::ostream& out);
void cmd_calibrate(const RunConfig& config, std::ostream& out);
void cmd_eval(const RunConfig& config, std::ostream& out);
void cmd_run(const RunConfig& config, std::ostream& out);
void cmd_subsample(const RunConfig& config, std::ostream& out);
void cmd_batch_plan(const RunConfig& config, std::ostream& out);

}  // namespace mgte::cli
