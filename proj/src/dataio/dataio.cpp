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

#include "mgte/dataio.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>
#include <unordered_set>

#include <json.hpp>

#include "mgte/csv_reader.hpp"
#include "mgte/errors.hpp"

namespace mgte::dataio {

using json = nlohmann::json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

constexpr std::array<std::string_view, 5> kRequiredColumns{"id", "model", "domain", "attack", "decoding"};

// Raw column values of one dataset row, before interpretation.
struct RawRow {
    std::string id, model, domain, attack, decoding;
    std::optional<std::string> adv_source_id;
    std::optional<std::string> generation;
};

void add_row(Dataset& ds, RawRow row, std::size_t line) {
    if (row.id.empty()) throw SchemaError("empty id on line " + std::to_string(line));
    if (ds.meta.contains(row.id)) {
        throw IntegrityError("duplicate id '" + row.id + "' on line " + std::to_string(line));
    }
    SampleMeta m;
    m.id = row.id;
    if (row.adv_source_id && !row.adv_source_id->empty()) m.source_id = std::move(row.adv_source_id);
    m.generator = lower(row.model);
    m.domain = std::move(row.domain);
    m.attack = std::move(row.attack);
    m.decoding = std::move(row.decoding);
    if (row.generation) ds.texts.emplace(row.id, std::move(*row.generation));
    ds.file_order.push_back(row.id);
    ds.meta.emplace(std::move(row.id), std::move(m));
}

Dataset parse_dataset_csv(std::string_view data) {
    CsvReader reader(data);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw SchemaError("dataset is empty (no header row)");

    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i] == name) return i;
        }
        return std::nullopt;
    };
    std::array<std::size_t, kRequiredColumns.size()> req{};
    for (std::size_t i = 0; i < kRequiredColumns.size(); ++i) {
        const auto c = column(kRequiredColumns[i]);
        if (!c) throw SchemaError("missing required column '" + std::string(kRequiredColumns[i]) + "'");
        req[i] = *c;
    }
    const auto adv_col = column("adv_source_id");
    const auto gen_col = column("generation");
    const std::size_t n_cols = fields.size();

    Dataset ds;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() != n_cols) {
            throw SchemaError("line " + std::to_string(reader.line()) + " has " + std::to_string(fields.size()) +
                              " fields, header has " + std::to_string(n_cols));
        }
        RawRow row{fields[req[0]], fields[req[1]], fields[req[2]], fields[req[3]], fields[req[4]], {}, {}};
        if (adv_col) row.adv_source_id = fields[*adv_col];
        if (gen_col) row.generation = fields[*gen_col];
        add_row(ds, std::move(row), reader.line());
    }
    return ds;
}

std::optional<std::string> optional_string(const json& obj, std::string_view key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number()) return it->dump();
    throw SchemaError("column '" + std::string(key) + "' on line " + std::to_string(line) + " is not a string");
}

Dataset parse_dataset_jsonl(std::istream& in) {
    Dataset ds;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        json obj;
        try {
            obj = json::parse(text);
        } catch (const json::parse_error& e) {
            throw SchemaError("line " + std::to_string(line) + " is not valid JSON: " + e.what());
        }
        if (!obj.is_object()) throw SchemaError("line " + std::to_string(line) + " is not a JSON object");
        std::array<std::string, kRequiredColumns.size()> req;
        for (std::size_t i = 0; i < kRequiredColumns.size(); ++i) {
            auto v = optional_string(obj, kRequiredColumns[i], line);
            if (!v) {
                throw SchemaError("missing required column '" + std::string(kRequiredColumns[i]) + "' on line " +
                                  std::to_string(line));
            }
            req[i] = std::move(*v);
        }
        RawRow row{std::move(req[0]), std::move(req[1]), std::move(req[2]), std::move(req[3]), std::move(req[4]),
                   optional_string(obj, "adv_source_id", line), optional_string(obj, "generation", line)};
        add_row(ds, std::move(row), line);
    }
    return ds;
}

}  // namespace

LabelMap Dataset::labels() const {
    LabelMap out;
    out.reserve(meta.size());
    for (const auto& [id, m] : meta) out.emplace(id, m.label());
    return out;
}

DatasetFormat parse_dataset_format(std::string_view text) {
    const std::string t = lower(text);
    if (t == "csv") return DatasetFormat::Csv;
    if (t == "jsonl" || t == "json-lines" || t == "jsonlines" || t == "ndjson") return DatasetFormat::JsonLines;
    throw ConfigError("unknown dataset format '" + std::string(text) + "' (expected csv or jsonl)");
}

DatasetFormat infer_dataset_format(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    return (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") ? DatasetFormat::JsonLines : DatasetFormat::Csv;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

Dataset parse_dataset(std::istream& in, DatasetFormat format) {
    if (format == DatasetFormat::JsonLines) return parse_dataset_jsonl(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset_csv(buf.str());
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    if (format == DatasetFormat::Csv) return parse_dataset_csv(read_file(path));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse_dataset_jsonl(in);
}

ModelScores parse_scores(std::istream& in) {
    std::string text;
    std::size_t line = 0;
    std::optional<std::string> model_id;
    ScoreKind kind = ScoreKind::Probs;
    std::string_view value_key;
    std::size_t k = 0;
    std::vector<std::string> ids;
    std::vector<double> values;
    std::unordered_set<std::string> seen;
    std::vector<double> row;

    while (std::getline(in, text)) {
        ++line;
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        json obj;
        try {
            obj = json::parse(text);
        } catch (const json::parse_error& e) {
            throw SchemaError("line " + std::to_string(line) + " is not valid JSON: " + e.what());
        }
        if (!obj.is_object()) throw SchemaError("line " + std::to_string(line) + " is not a JSON object");

        if (!model_id) {
            auto mid = obj.find("model_id");
            auto kd = obj.find("kind");
            if (mid == obj.end() || kd == obj.end() || !mid->is_string() || !kd->is_string()) {
                throw SchemaError("line " + std::to_string(line) +
                                  ": score file must start with a {\"model_id\", \"kind\"} header");
            }
            model_id = mid->get<std::string>();
            kind = parse_score_kind(kd->get<std::string>());
            value_key = kind == ScoreKind::Logits ? "logits" : "probs";
            continue;
        }

        const bool has_logits = obj.contains("logits");
        const bool has_probs = obj.contains("probs");
        if (has_logits && has_probs) {
            throw SchemaError("line " + std::to_string(line) + " carries both logits and probs");
        }
        if (has_logits != (kind == ScoreKind::Logits) || has_probs != (kind == ScoreKind::Probs)) {
            throw SchemaError("line " + std::to_string(line) + " mixes score kinds: header declares " +
                              std::string(to_string(kind)) + ", row lacks \"" + std::string(value_key) + "\"");
        }
        auto id = obj.find("id");
        if (id == obj.end() || !id->is_string()) {
            throw SchemaError("line " + std::to_string(line) + " has no string \"id\"");
        }
        const json& arr = obj.at(value_key);
        if (!arr.is_array()) throw SchemaError("line " + std::to_string(line) + ": scores are not an array");
        row.clear();
        for (const json& v : arr) {
            if (!v.is_number()) throw ValidationError("non-numeric score entry", line);
            row.push_back(v.get<double>());
        }
        if (k == 0) {
            if (row.size() < 2) throw SchemaError("line " + std::to_string(line) + ": need at least 2 classes");
            k = row.size();
        } else if (row.size() != k) {
            throw SchemaError("line " + std::to_string(line) + " has " + std::to_string(row.size()) +
                              " scores, expected " + std::to_string(k));
        }
        validate_score_row(row, kind, line);
        std::string sid = id->get<std::string>();
        if (!seen.insert(sid).second) {
            throw IntegrityError("duplicate id '" + sid + "' on line " + std::to_string(line));
        }
        ids.push_back(std::move(sid));
        values.insert(values.end(), row.begin(), row.end());
    }
    if (!model_id) throw SchemaError("score file is empty (no header line)");
    if (ids.empty()) throw EmptyInputError("score file for '" + *model_id + "' has no rows");
    return ModelScores(std::move(*model_id), kind, std::move(ids), std::move(values), k);
}

ModelScores load_scores(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open score file '" + path.string() + "'");
    return parse_scores(in);
}

void write_scores(std::ostream& out, const ModelScores& scores) {
    out << json{{"model_id", scores.model_id()}, {"kind", std::string(to_string(scores.kind()))}}.dump() << '\n';
    const char* key = scores.kind() == ScoreKind::Logits ? "logits" : "probs";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto r = scores.row(i);
        json obj;
        obj["id"] = scores.sample_ids()[i];
        obj[key] = std::vector<double>(r.begin(), r.end());
        out << obj.dump() << '\n';
    }
}

std::vector<std::string> load_id_list(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
        if (start == line.size() || line[start] == '#') continue;
        ids.push_back(line.substr(start));
    }
    return ids;
}

}  // namespace mgte::dataio
