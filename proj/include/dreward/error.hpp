// Copyright 2026 The dreward Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dreward {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A JSONL record could not be decoded. `line()` is 1-based.
class LoadError : public Error {
 public:
  LoadError(std::string path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

/// A record decoded fine but breaks one or more data invariants.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& context, std::vector<std::string> violations)
      : Error(format(context, violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string format(const std::string& context,
                            const std::vector<std::string>& violations) {
    std::string msg = context + ": " + std::to_string(violations.size()) + " violation(s)";
    for (const auto& v : violations) msg += "\n  - " + v;
    return msg;
  }

  std::vector<std::string> violations_;
};

/// Raised when a metric is requested for a video without any spoken sentence.
class EmptyAnnotationError : public Error {
 public:
  using Error::Error;
};

}  // namespace dreward
