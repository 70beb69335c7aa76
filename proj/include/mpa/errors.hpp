// Copyright 2026 The mpa-eval Authors.
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

#ifndef MPA_ERRORS_HPP_
#define MPA_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpa {

/// Base of every error raised by the toolkit. The CLI maps subclasses to
/// exit codes: input problems exit 1, broken internal invariants exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line_no = 0)
      : Error(line_no ? "line " + std::to_string(line_no) + ": " + what : what),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a precondition (bad index, untrained model, missing file).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant violated; a bug rather than bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal problems collected while processing a batch. With --strict the
/// CLI turns a non-empty list into an error.
struct Diagnostics {
  std::vector<std::string> messages;

  void add(std::string msg) { messages.push_back(std::move(msg)); }
  bool empty() const { return messages.empty(); }
  std::size_t size() const { return messages.size(); }
};

}  // namespace mpa

#endif  // MPA_ERRORS_HPP_
