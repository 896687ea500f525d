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

#include "mgte/csv_reader.hpp"

#include "mgte/errors.hpp"

namespace mgte::dataio {

CsvReader::CsvReader(std::string_view data) : data_(data) {
    if (data_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
}

bool CsvReader::next(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= data_.size()) return false;
    record_line_ = line_;

    std::string field;
    bool quoted = false;
    bool after_quote = false;  // closing quote seen; only a separator may follow
    while (pos_ < data_.size()) {
        const char c = data_[pos_++];
        if (quoted) {
            if (c == '"') {
                if (pos_ < data_.size() && data_[pos_] == '"') {
                    field += '"';
                    ++pos_;
                } else {
                    quoted = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line_;
                field += c;
            }
            continue;
        }
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            after_quote = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
            ++line_;
            fields.push_back(std::move(field));
            return true;
        } else if (after_quote) {
            throw SchemaError("unexpected character after closing quote on line " + std::to_string(line_));
        } else if (c == '"') {
            if (!field.empty()) throw SchemaError("stray quote inside unquoted field on line " + std::to_string(line_));
            quoted = true;
        } else {
            field += c;
        }
    }
    if (quoted) throw SchemaError("unterminated quoted field starting on line " + std::to_string(record_line_));
    fields.push_back(std::move(field));
    return true;
}

}  // namespace mgte::dataio
