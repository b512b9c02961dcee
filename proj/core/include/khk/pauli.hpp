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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "khk/linalg.hpp"

namespace khk {

// The algebra element (i/2) * (sigma_1 (x) ... (x) sigma_n) named by a label
// over {I, X, Y, Z}. The first letter acts on the most significant qubit.
//
// Besides the dense matrix, the word keeps its one-nonzero-per-row form
// (column index and value per row), which makes inner products and
// multiplication by a word O(N) and O(N^2) respectively.
class PauliWord {
 public:
  explicit PauliWord(std::string_view label);

  const std::string &label() const noexcept { return label_; }
  int qubits() const noexcept { return static_cast<int>(label_.size()); }
  Eigen::Index dim() const noexcept { return Eigen::Index{1} << label_.size(); }
  const Matrix &matrix() const noexcept { return matrix_; }

  /// Re tr(word^dagger x).
  double inner(const Matrix &x) const;
  /// <word, word> = 2^(n-2).
  double norm_squared() const noexcept { return static_cast<double>(dim()) / 4.0; }

  Matrix left_multiply(const Matrix &x) const;   // word * x
  Matrix right_multiply(const Matrix &x) const;  // x * word
  /// [x, word]
  Matrix commutator_with(const Matrix &x) const;

  bool operator==(const PauliWord &other) const { return label_ == other.label_; }

 private:
  std::string label_;
  std::vector<Eigen::Index> column_;
  std::vector<Complex> value_;
  Matrix matrix_;
};

/// Throws BadLabel on an empty label or one containing other characters.
PauliWord pauli_word(std::string_view label);

std::vector<PauliWord> pauli_words(std::span<const std::string> labels);
std::vector<std::string> labels_of(std::span<const PauliWord> words);

/// Projection onto the span of distinct Pauli words. Words are mutually
/// trace-orthogonal by construction, so no Gram check is performed.
Projection project_onto_words(const Matrix &x, std::span<const PauliWord> words);

/// sum_i coeffs[i] * words[i]
Matrix combine(std::span<const PauliWord> words, std::span<const double> coeffs);

}  // namespace khk
