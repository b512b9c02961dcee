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

#include "khk/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "khk/errors.hpp"

namespace khk {

MatrixDocument parse_matrix(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!doc.is_object()) throw ParseError("/", "expected an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw ParseError("/n", "missing or non-integer qubit count");
  }
  MatrixDocument out;
  out.n = doc["n"].get<int>();
  if (out.n < 1 || out.n > 14) throw ParseError("/n", "qubit count out of range");
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    throw ParseError("/entries", "missing entry list");
  }
  const auto &entries = doc["entries"];
  const Eigen::Index dim = Eigen::Index{1} << out.n;
  if (static_cast<Eigen::Index>(entries.size()) != dim * dim) {
    throw ParseError("/entries", "expected " + std::to_string(dim * dim) + " entries, found " +
                                     std::to_string(entries.size()));
  }
  out.matrix.resize(dim, dim);
  for (Eigen::Index i = 0; i < dim * dim; ++i) {
    const auto &e = entries[static_cast<std::size_t>(i)];
    const std::string at = "/entries/" + std::to_string(i);
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ParseError(at, "expected an [re, im] pair of numbers");
    }
    out.matrix(i / dim, i % dim) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

std::string format_matrix(const Matrix &m) {
  const Eigen::Index dim = m.rows();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if (m.cols() != dim || (Eigen::Index{1} << n) != dim) {
    throw Error(ErrorKind::DimMismatch, "matrix documents hold 2^n x 2^n matrices");
  }
  std::string out = "{\n  \"n\": " + std::to_string(n) + ",\n  \"entries\": [";
  char buf[96];
  for (Eigen::Index i = 0; i < dim * dim; ++i) {
    const Complex z = m(i / dim, i % dim);
    std::snprintf(buf, sizeof buf, "%s\n    [%.16e, %.16e]", i == 0 ? "" : ",", z.real(),
                  z.imag());
    out += buf;
  }
  out += "\n  ]\n}\n";
  return out;
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::ParseError, "write to " + path.string() + " failed");
}

MatrixDocument read_matrix_file(const std::filesystem::path &path) {
  return parse_matrix(read_text_file(path));
}

void write_matrix_file(const std::filesystem::path &path, const Matrix &m) {
  write_text_file(path, format_matrix(m));
}

}  // namespace khk
