// Copyright 2026 The khk Authors
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

#include <stdexcept>
#include <string>

namespace khk {

enum class ErrorKind {
  NotSkewHermitian,
  NotUnitary,
  NonOrthogonalBasis,
  Singular,
  BadLabel,
  DimMismatch,
  SubspaceViolation,
  OptimizerFailed,
  NotTensorWithIdentity,
  LevelExceedsRegister,
  ParseError,
  OrderTooHigh,
  RootSearchFailed,
  ReconstructionFailed,
};

const char *to_string(ErrorKind kind);

// Base class for every failure raised by the library. The kind lets callers
// (notably the CLI) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string &what)
      : Error(ErrorKind::ParseError, "at " + location + ": " + what),
        location_(std::move(location)) {}

  const std::string &location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace khk
