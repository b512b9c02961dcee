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

#include <string>

#include "khk/errors.hpp"
#include "khk/kg_basis.hpp"
#include "khk/linalg.hpp"

namespace khk {

// Truncated Baker-Campbell-Hausdorff comparison backend for the split
// g = exp(k) exp(m), k in span(K_n), m in span(M_n).

inline constexpr int kMaxBchOrder = 8;

struct BchConfig {
  int truncation_order = 6;
  // Stop once a step changes the coordinates of m by less than this (relative),
  // or the residual itself drops below it.
  double root_tol = 1e-10;
  int max_root_iters = 100;
};

/// Dynkin series of log(e^a e^b) through total degree `order`.
/// Throws OrderTooHigh unless 1 <= order <= kMaxBchOrder.
Matrix truncated_bch(const Matrix &a, const Matrix &b, int order);
AlgebraElement truncated_bch(const AlgebraElement &a, const AlgebraElement &b, int order);

/// Coefficient of the right-nested bracket [w_1, [w_2, ... w_L]] for a word
/// over {a, b} in the Dynkin series (0 when the word is longer than the cap).
double dynkin_coefficient(const std::string &word);

struct BchProjections {
  AlgebraElement pk;
  AlgebraElement pm;
};

/// truncated_bch(k, m) split into its span(K) and span(M) parts.
BchProjections split_pk_pm(const AlgebraElement &k, const AlgebraElement &m, const KGBasis &basis,
                           int order);

struct BchSplit {
  AlgebraElement k;
  AlgebraElement m;
  double residual = 0.0;       // ||g - exp(k) exp(m)||_F
  double root_residual = 0.0;  // ||series mismatch|| at the returned m
  double k_leakage = 0.0;      // part of log(g exp(-m)) outside span(K)
  int iterations = 0;
};

class RootSearchFailed : public Error {
 public:
  RootSearchFailed(const std::string &what, BchSplit best)
      : Error(ErrorKind::RootSearchFailed, what), best_(std::move(best)) {}
  const BchSplit &best() const noexcept { return best_; }

 private:
  BchSplit best_;
};

/// Least-squares root search over the coordinates of m in span(M): with
/// L = log g and Q(m) = proj_K bch(L, -m), drives bch(Q(m), m) - L to zero.
/// Nothing guarantees a small residual outside the series' convergence ball.
BchSplit solve_bch_split(const Matrix &g, const KGBasis &basis, const BchConfig &cfg = {});

}  // namespace khk
