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

#include <filesystem>
#include <string>
#include <string_view>

#include "khk/linalg.hpp"

namespace khk {

// Matrix document: {"n": <qubits>, "entries": [[re, im], ...]} with the 4^n
// entries in row-major order.
struct MatrixDocument {
  int n = 0;
  Matrix matrix;
};

/// Throws ParseError (with location) on malformed text or a wrong entry count.
MatrixDocument parse_matrix(std::string_view text);
std::string format_matrix(const Matrix &m);

MatrixDocument read_matrix_file(const std::filesystem::path &path);
void write_matrix_file(const std::filesystem::path &path, const Matrix &m);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, std::string_view text);

}  // namespace khk
