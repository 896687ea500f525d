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

#include <stdexcept>
#include <string>

namespace mgte {

// Every error raised for bad user input derives from UserError; the CLI maps
// it to exit code 2. Anything else escaping to main is an internal failure.
class UserError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public UserError {
public:
    explicit ConfigError(const std::string& what) : UserError("config error: " + what) {}
};

class NumericInputError : public UserError {
public:
    explicit NumericInputError(const std::string& what) : UserError("numeric input error: " + what) {}
};

class EmptyInputError : public UserError {
public:
    explicit EmptyInputError(const std::string& what) : UserError("empty input: " + what) {}
};

class AlignmentError : public UserError {
public:
    explicit AlignmentError(const std::string& what) : UserError("alignment error: " + what) {}
};

class LabelingError : public UserError {
public:
    explicit LabelingError(const std::string& what) : UserError("labeling error: " + what) {}
};

class SchemaError : public UserError {
public:
    explicit SchemaError(const std::string& what) : UserError("schema error: " + what) {}
};

class IntegrityError : public UserError {
public:
    explicit IntegrityError(const std::string& what) : UserError("integrity error: " + what) {}
};

/// Raised for a row that parses but violates a score/probability invariant.
/// `line()` is 1-based and 0 when the row did not come from a file.
class ValidationError : public UserError {
public:
    ValidationError(const std::string& what, std::size_t line)
        : UserError(line == 0 ? "validation error: " + what
                              : "validation error at line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class CalibrationError : public UserError {
public:
    explicit CalibrationError(const std::string& what) : UserError("calibration error: " + what) {}
};

class IoError : public UserError {
public:
    explicit IoError(const std::string& what) : UserError("io error: " + what) {}
};

}  // namespace mgte
