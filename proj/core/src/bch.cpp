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

#include "khk/bch.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

#include "khk/pauli.hpp"

namespace khk {

namespace {

using CoefficientTable = std::map<std::string, double>;

double factorial(int k) {
  double out = 1.0;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

// Walks every sequence (r_1, s_1), ..., (r_j, s_j) with r_i + s_i >= 1 and
// total degree at most kMaxBchOrder, adding
//   (-1)^(j-1) / (j * degree * prod r_i! s_i!)
// to the word a^r_1 b^s_1 ... a^r_j b^s_j.
void enumerate(CoefficientTable &table, std::string &word, int terms, int budget,
               double weight) {
  for (int d = 1; d <= budget; ++d) {
    for (int r = 0; r <= d; ++r) {
      const int s = d - r;
      const std::size_t mark = word.size();
      word.append(static_cast<std::size_t>(r), 'a');
      word.append(static_cast<std::size_t>(s), 'b');
      const double w = weight / (factorial(r) * factorial(s));
      const int j = terms + 1;
      const double sign = j % 2 == 1 ? 1.0 : -1.0;
      table[word] += sign * w / (j * static_cast<double>(word.size()));
      enumerate(table, word, j, budget - d, w);
      word.resize(mark);
    }
  }
}

const CoefficientTable &coefficient_table() {
  static const CoefficientTable table = [] {
    CoefficientTable t;
    std::string word;
    enumerate(t, word, 0, kMaxBchOrder, 1.0);
    // Brackets ending in a repeated letter vanish.
    for (auto it = t.begin(); it != t.end();) {
      const std::string &w = it->first;
      const bool zero = std::abs(it->second) < 1e-15 ||
                        (w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2]);
      it = zero ? t.erase(it) : std::next(it);
    }
    return t;
  }();
  return table;
}

void check_order(int order) {
  if (order < 1 || order > kMaxBchOrder) {
    throw Error(ErrorKind::OrderTooHigh,
                "truncation order " + std::to_string(order) + " outside [1, " +
                    std::to_string(kMaxBchOrder) + "]");
  }
}

Eigen::VectorXd coordinates(const Matrix &x, std::span<const PauliWord> words) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(words.size()));
  for (std::size_t i = 0; i < words.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = words[i].inner(x) / words[i].norm_squared();
  }
  return out;
}

Matrix from_coordinates(std::span<const PauliWord> words, const Eigen::VectorXd &x) {
  Matrix out = Matrix::Zero(words[0].dim(), words[0].dim());
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += x(static_cast<Eigen::Index>(i)) * words[i].matrix();
  }
  return out;
}

}  // namespace

double dynkin_coefficient(const std::string &word) {
  const auto &table = coefficient_table();
  const auto it = table.find(word);
  return it == table.end() ? 0.0 : it->second;
}

Matrix truncated_bch(const Matrix &a, const Matrix &b, int order) {
  check_order(order);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimMismatch, "truncated_bch operands differ in shape");
  }
  // Right-nested brackets, memoized by suffix.
  std::unordered_map<std::string, Matrix> bracket;
  bracket["a"] = a;
  bracket["b"] = b;
  const auto value = [&](const std::string &word, auto &&self) -> const Matrix & {
    auto it = bracket.find(word);
    if (it != bracket.end()) return it->second;
    const Matrix &tail = self(word.substr(1), self);
    const Matrix &head = word[0] == 'a' ? a : b;
    return bracket.emplace(word, commutator(head, tail)).first->second;
  };
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (const auto &[word, coeff] : coefficient_table()) {
    if (static_cast<int>(word.size()) > order) continue;
    out += coeff * value(word, value);
  }
  return out;
}

AlgebraElement truncated_bch(const AlgebraElement &a, const AlgebraElement &b, int order) {
  return AlgebraElement(truncated_bch(a.matrix, b.matrix, order));
}

BchProjections split_pk_pm(const AlgebraElement &k, const AlgebraElement &m, const KGBasis &basis,
                           int order) {
  const Matrix series = truncated_bch(k.matrix, m.matrix, order);
  Projection pk = project_onto_words(series, basis.k_set);
  BchProjections out;
  out.pk = AlgebraElement(series - pk.residual);
  out.pk.coords = std::move(pk.coords);
  out.pk.basis_name = "K";
  out.pk.residual_norm = 0.0;
  Projection pm = project_onto_words(series, basis.m_set);
  out.pm = AlgebraElement(series - pm.residual);
  out.pm.coords = std::move(pm.coords);
  out.pm.basis_name = "M";
  out.pm.residual_norm = 0.0;
  return out;
}

BchSplit solve_bch_split(const Matrix &g, const KGBasis &basis, const BchConfig &cfg) {
  check_order(cfg.truncation_order);
  if (!(cfg.root_tol > 0.0) || cfg.max_root_iters < 1) {
    throw Error(ErrorKind::DimMismatch, "BCH root search settings must be positive");
  }
  const Matrix log_g = logm_unitary(g);
  std::vector<PauliWord> all(basis.k_set);
  all.insert(all.end(), basis.m_set.begin(), basis.m_set.end());
  const std::span<const PauliWord> m_words(basis.m_set);
  const std::span<const PauliWord> k_words(basis.k_set);
  const int order = cfg.truncation_order;

  const auto residual_of = [&](const Eigen::VectorXd &x) {
    const Matrix m = from_coordinates(m_words, x);
    const Matrix q = truncated_bch(log_g, Matrix(-m), order);
    const Matrix k = from_coordinates(k_words, coordinates(q, k_words));
    return coordinates(truncated_bch(k, m, order) - log_g, all);
  };

  Eigen::VectorXd x = coordinates(log_g, m_words);
  Eigen::VectorXd r = residual_of(x);
  double damping = 1e-6;
  bool converged = r.norm() <= cfg.root_tol;
  int iter = 0;
  for (; iter < cfg.max_root_iters && !converged; ++iter) {
    Eigen::MatrixXd jac(r.size(), x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double step = 1e-6 * std::max(1.0, std::abs(x(j)));
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += step;
      xm(j) -= step;
      jac.col(j) = (residual_of(xp) - residual_of(xm)) / (2.0 * step);
    }
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd rhs = -jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 16; ++tries) {
      Eigen::MatrixXd lhs = normal;
      lhs.diagonal().array() += damping * std::max(1.0, normal.diagonal().maxCoeff());
      const Eigen::VectorXd delta = lhs.ldlt().solve(rhs);
      const Eigen::VectorXd trial = x + delta;
      const Eigen::VectorXd trial_r = residual_of(trial);
      if (trial_r.norm() < r.norm()) {
        converged = delta.norm() <= cfg.root_tol * std::max(1.0, x.norm()) ||
                    trial_r.norm() <= cfg.root_tol;
        x = trial;
        r = trial_r;
        damping = std::max(damping / 10.0, 1e-15);
        improved = true;
        break;
      }
      damping *= 10.0;
    }
    // No descent direction left: the residual sits at its truncation floor.
    if (!improved) converged = true;
  }

  BchSplit out;
  out.iterations = iter;
  out.root_residual = r.norm();
  out.m = AlgebraElement(from_coordinates(m_words, x));
  out.m.coords.assign(x.data(), x.data() + x.size());
  out.m.basis_name = "M";
  const Matrix k_full = logm_unitary(g * expm_skew(-out.m.matrix));
  Projection pk = project_onto_words(k_full, k_words);
  out.k = AlgebraElement(k_full - pk.residual);
  out.k.coords = std::move(pk.coords);
  out.k.basis_name = "K";
  out.k.residual_norm = pk.residual_norm;
  out.k_leakage = pk.residual_norm;
  out.residual = (g - expm_skew(out.k.matrix) * expm_skew(out.m.matrix)).norm();
  if (!converged) {
    throw RootSearchFailed("no root within " + std::to_string(cfg.max_root_iters) +
                               " iterations (residual " + std::to_string(out.root_residual) + ")",
                           std::move(out));
  }
  return out;
}

}  // namespace khk
