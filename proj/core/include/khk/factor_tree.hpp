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
#include <string_view>
#include <utility>
#include <vector>

#include "khk/linalg.hpp"

namespace khk {

enum class FactorKind { GlobalPhase, SubUnitary, LastQubit, CartanExp };

const char *to_string(FactorKind kind);

struct CartanTerm {
  std::string word;
  double coeff = 0.0;
};

// One multiplicative factor of a decomposition. A level-l factor acts on the
// first l qubits of the register and is padded with identities on the rest:
//
//   GlobalPhase  exp(i*phase) * I
//   SubUnitary   payload (x) I_2 (x) I^(n_total-l), payload in SU(2^(l-1))
//   LastQubit    I^(l-1) (x) payload (x) I^(n_total-l), payload in SU(2)
//   CartanExp    exp(sum_i coeff_i * word_i) (x) I^(n_total-l)
//
// A SubUnitary may sit at level n_total + 1, which is how an undecomposed
// root (two-qubit input) is stored.
struct Factor {
  FactorKind kind = FactorKind::GlobalPhase;
  int level = 0;
  std::size_t order_index = 0;
  std::string label;

  double phase = 0.0;                // GlobalPhase
  Matrix payload;                    // SubUnitary, LastQubit
  std::string basis_name;            // CartanExp: "H<l>" or "F<l>"
  std::vector<CartanTerm> terms;     // CartanExp
  double subspace_residual = 0.0;    // CartanExp: dropped off-span norm
  double subspace_error = 0.0;       // CartanExp: E_s before projection

  static Factor global_phase(double phase);
  static Factor sub_unitary(int level, Matrix payload, std::string label);
  static Factor last_qubit(int level, Matrix payload, std::string label);
  static Factor cartan_exp(int level, std::string basis_name,
                           std::vector<CartanTerm> terms, std::string label);

  /// sum_i coeff_i * word_i on `level` qubits (CartanExp only).
  Matrix cartan_generator() const;
};

struct DecompositionReport {
  double approx_error = 0.0;
  std::vector<std::pair<std::string, double>> subspace_errors;
  std::vector<std::pair<std::string, double>> subspace_residuals;
  double wall_time = 0.0;
  std::vector<std::pair<std::string, int>> optimizer_iterations;

  /// Mean of subspace_errors, 0 when there are none.
  double mean_subspace_error() const;
};

struct FactorTree {
  int n_total = 0;
  double phase = 0.0;
  std::vector<Factor> factors;
  DecompositionReport report;
};

/// Expands a factor to the full 2^n_total register.
/// Throws LevelExceedsRegister when the factor does not fit.
Matrix expand(const Factor &factor, int n_total);

/// exp(i*phase) times the left-to-right product of the expanded factors.
Matrix product(const FactorTree &tree);

inline constexpr int kFactorTreeFormatVersion = 1;

/// JSON text; real numbers carry 17 significant digits.
std::string serialize(const FactorTree &tree);

/// Throws ParseError (with a JSON-pointer style location) on malformed input.
FactorTree deserialize(std::string_view document);

}  // namespace khk
