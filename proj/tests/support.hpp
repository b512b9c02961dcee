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

#include <random>
#include <span>
#include <string>
#include <vector>

#include "khk/linalg.hpp"
#include "khk/matrix_io.hpp"
#include "khk/pauli.hpp"

namespace khk::testing {

inline std::string data_path(const std::string &name) {
  return std::string(KHK_TEST_DATA_DIR) + "/" + name;
}

inline Matrix load_fixture(const std::string &name) {
  return read_matrix_file(data_path(name)).matrix;
}

/// Random element of span(words) with coefficients uniform in [-scale, scale].
inline Matrix random_in_span(std::span<const PauliWord> words, double scale, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> c(words.size());
  for (auto &x : c) x = u(rng);
  return combine(words, c);
}

/// Plain Pauli matrices, without the i/2 factor.
inline Matrix sigma(char letter) {
  Matrix s = Matrix::Zero(2, 2);
  switch (letter) {
    case 'I':
      s(0, 0) = s(1, 1) = 1.0;
      break;
    case 'X':
      s(0, 1) = s(1, 0) = 1.0;
      break;
    case 'Y':
      s(0, 1) = Complex(0, -1);
      s(1, 0) = Complex(0, 1);
      break;
    case 'Z':
      s(0, 0) = 1.0;
      s(1, 1) = -1.0;
      break;
  }
  return s;
}

/// Dense Kronecker product written out with index arithmetic.
inline Matrix kron_loops(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// (i/2) sigma_1 (x) ... (x) sigma_n built from dense tensor products.
inline Matrix word_dense(const std::string &label) {
  Matrix out = Matrix::Identity(1, 1);
  for (char c : label) out = kron_loops(out, sigma(c));
  return Complex(0, 0.5) * out;
}

}  // namespace khk::testing
