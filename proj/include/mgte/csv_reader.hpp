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
#include <string>
#include <string_view>
#include <vector>

namespace mgte::dataio {

/// Minimal RFC 4180 record reader over an in-memory buffer: comma separated,
/// double-quoted fields may contain commas, CR/LF and "" escapes. Records end
/// at LF or CRLF. A leading UTF-8 BOM is skipped.
class CsvReader {
public:
    explicit CsvReader(std::string_view data);

    /// Reads the next record into `fields`; false at end of input.
    /// Throws SchemaError on an unterminated quote or stray quote.
    bool next(std::vector<std::string>& fields);

    /// 1-based line on which the last returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

}  // namespace mgte::dataio
