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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgte/core_model.hpp"
#include "mgte/evaluation.hpp"

namespace mgte::dataio {

enum class DatasetFormat : std::uint8_t { Csv, JsonLines };

DatasetFormat parse_dataset_format(std::string_view text);
/// .jsonl / .json / .ndjson -> JsonLines, anything else -> Csv.
DatasetFormat infer_dataset_format(const std::filesystem::path& path);

/// RAID-style sample metadata, plus the generation text when the input has a
/// `generation` column.
struct Dataset {
    MetaMap meta;
    std::map<std::string, std::string, std::less<>> texts;
    std::vector<std::string> file_order;  // ids as they appeared in the input

    std::size_t row_count() const noexcept { return file_order.size(); }
    LabelMap labels() const;
};

/// Reads a dataset. Required columns: id, model, domain, attack, decoding;
/// adv_source_id, title and generation are optional, anything else is
/// ignored. `generator` is the lower-cased `model` value.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
Dataset parse_dataset(std::istream& in, DatasetFormat format);

/// Score file: JSON lines, first line {"model_id": ..., "kind": "LOGITS"|"PROBS"},
/// then one {"id": ..., "logits"|"probs": [...]} per sample.
ModelScores load_scores(const std::filesystem::path& path);
ModelScores parse_scores(std::istream& in);
void write_scores(std::ostream& out, const ModelScores& scores);

/// Reads one id per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> load_id_list(const std::filesystem::path& path);

/// Whole-file read; throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename so readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace mgte::dataio
