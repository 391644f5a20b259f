// Copyright 2026 The dpsynth Authors
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

#ifndef DPSYNTH_ERRORS_H_
#define DPSYNTH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpsynth {

// Base class for every error raised by the library. The subclasses map onto
// the CLI exit codes (see ExitCodeFor).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument is outside the domain of the operation (non-positive
// shape, probability outside (0,1), value out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Arguments are individually valid but used inconsistently (length mismatch,
// wrong prior mode, non-neighbouring datasets, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// The privacy budget cannot be met for the requested prior structure.
class InfeasibleBudgetError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpsynth

#endif  // DPSYNTH_ERRORS_H_
