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

#include "khk/errors.hpp"

namespace khk {

const char *to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSkewHermitian: return "NotSkewHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NonOrthogonalBasis: return "NonOrthogonalBasis";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::BadLabel: return "BadLabel";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::SubspaceViolation: return "SubspaceViolation";
    case ErrorKind::OptimizerFailed: return "OptimizerFailed";
    case ErrorKind::NotTensorWithIdentity: return "NotTensorWithIdentity";
    case ErrorKind::LevelExceedsRegister: return "LevelExceedsRegister";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::OrderTooHigh: return "OrderTooHigh";
    case ErrorKind::RootSearchFailed: return "RootSearchFailed";
    case ErrorKind::ReconstructionFailed: return "ReconstructionFailed";
  }
  return "Unknown";
}

}  // namespace khk
