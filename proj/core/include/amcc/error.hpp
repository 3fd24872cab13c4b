// Copyright 2026 The AMCC Authors. All Rights Reserved.
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

#ifndef AMCC_ERROR_HPP_
#define AMCC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace amcc {

// Base class for every error raised by the library. Callers that only care
// about "did it work" catch this; the subclasses carry the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes disagree, or a size is outside its valid range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A scalar argument lies outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Configuration rejected (e.g. the mu/beta convexity bound is violated).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A linear solve or factorization failed; the message names the subproblem.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Input violates a documented data invariant (bad annotation value, worker
// without annotations, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An internal invariant check failed during a run.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Duplicate record in an input file.
class ConflictError : public Error {
 public:
  using Error::Error;
};

// Feature rows do not line up with the annotation id map.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// The annotation source could not answer a query.
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace amcc

#endif  // AMCC_ERROR_HPP_
