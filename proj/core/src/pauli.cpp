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

#include "khk/pauli.hpp"

#include "khk/errors.hpp"

namespace khk {

PauliWord::PauliWord(std::string_view label) : label_(label) {
  if (label_.empty()) throw Error(ErrorKind::BadLabel, "empty Pauli label");
  Eigen::Index flip_mask = 0;
  const int n = qubits();
  for (int q = 0; q < n; ++q) {
    const char c = label_[static_cast<std::size_t>(q)];
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      throw Error(ErrorKind::BadLabel, "character '" + std::string(1, c) +
                                           "' in label \"" + label_ + "\"");
    }
    if (c == 'X' || c == 'Y') flip_mask |= Eigen::Index{1} << (n - 1 - q);
  }
  const Eigen::Index size = dim();
  column_.resize(static_cast<std::size_t>(size));
  value_.resize(static_cast<std::size_t>(size));
  matrix_ = Matrix::Zero(size, size);
  for (Eigen::Index row = 0; row < size; ++row) {
    Complex value(0.0, 0.5);
    for (int q = 0; q < n; ++q) {
      const bool bit = (row >> (n - 1 - q)) & 1;
      switch (label_[static_cast<std::size_t>(q)]) {
        case 'Y': value *= bit ? Complex(0, 1) : Complex(0, -1); break;
        case 'Z': if (bit) value = -value; break;
        default: break;
      }
    }
    const Eigen::Index col = row ^ flip_mask;
    column_[static_cast<std::size_t>(row)] = col;
    value_[static_cast<std::size_t>(row)] = value;
    matrix_(row, col) = value;
  }
}

double PauliWord::inner(const Matrix &x) const {
  double acc = 0.0;
  for (std::size_t r = 0; r < column_.size(); ++r) {
    acc += (std::conj(value_[r]) * x(static_cast<Eigen::Index>(r), column_[r])).real();
  }
  return acc;
}

Matrix PauliWord::left_multiply(const Matrix &x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < column_.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = value_[r] * x.row(column_[r]);
  }
  return out;
}

Matrix PauliWord::right_multiply(const Matrix &x) const {
  // (x w)(:, col_r) = x(:, r) * value_r
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < column_.size(); ++r) {
    out.col(column_[r]) = x.col(static_cast<Eigen::Index>(r)) * value_[r];
  }
  return out;
}

Matrix PauliWord::commutator_with(const Matrix &x) const {
  return right_multiply(x) - left_multiply(x);
}

PauliWord pauli_word(std::string_view label) { return PauliWord(label); }

std::vector<PauliWord> pauli_words(std::span<const std::string> labels) {
  std::vector<PauliWord> out;
  out.reserve(labels.size());
  for (const auto &l : labels) out.emplace_back(l);
  return out;
}

std::vector<std::string> labels_of(std::span<const PauliWord> words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto &w : words) out.push_back(w.label());
  return out;
}

Projection project_onto_words(const Matrix &x, std::span<const PauliWord> words) {
  Projection out;
  out.coords.resize(words.size());
  out.residual = x;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].dim() != x.rows() || x.rows() != x.cols()) {
      throw Error(ErrorKind::DimMismatch, "word " + words[i].label() +
                                              " does not match matrix dimension");
    }
    out.coords[i] = words[i].inner(x) / words[i].norm_squared();
    out.residual -= out.coords[i] * words[i].matrix();
  }
  out.residual_norm = out.residual.norm();
  return out;
}

Matrix combine(std::span<const PauliWord> words, std::span<const double> coeffs) {
  if (words.size() != coeffs.size()) {
    throw Error(ErrorKind::DimMismatch, "coefficient count differs from word count");
  }
  if (words.empty()) throw Error(ErrorKind::DimMismatch, "empty word list");
  Matrix out = Matrix::Zero(words[0].dim(), words[0].dim());
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += coeffs[i] * words[i].matrix();
  }
  return out;
}

}  // namespace khk
