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

#include <memory>
#include <string>
#include <vector>

#include "khk/pauli.hpp"

namespace khk {

// Khaneja-Glaser basis of su(2^n), split by the last-qubit involutions.
//
//   m_set   words ending in X or Y                  (-1 eigenspace of Theta_Z)
//   k_set   I..IZ together with k0_set and k1_set   (+1 eigenspace of Theta_Z)
//   k0_set  G_{n-1} (x) I                           (+1 eigenspace of Theta_X)
//   k1_set  G_{n-1} (x) Z                           (-1 eigenspace of Theta_X)
//   h_set   Cartan subalgebra inside span(m_set)
//   f_set   Cartan subalgebra inside span(k1_set); empty for n = 2
//
// For n = 2 the m/k/h sets are the fixed seeds (m = two-letter words without
// identity, k = single-letter words); k0/k1 follow the recursive formula.
// Every set is stored in canonical order: labels ascending with I < X < Y < Z.
struct KGBasis {
  int n = 0;
  std::vector<PauliWord> m_set;
  std::vector<PauliWord> k_set;
  std::vector<PauliWord> k0_set;
  std::vector<PauliWord> k1_set;
  std::vector<PauliWord> h_set;
  std::vector<PauliWord> f_set;

  /// (i/2) I^(n-1) (x) Z
  PauliWord z_word() const;
  /// k1_set followed by z_word(): the span holding the Theta_X logarithms.
  std::vector<PauliWord> k1_with_z() const;
};

/// Builds all six sets for n >= 2 qubits.
KGBasis build_kg_basis(int n);

/// Process-wide cache of build_kg_basis; safe for concurrent first use.
std::shared_ptr<const KGBasis> cached_kg_basis(int n);

/// Sorts words by label, I < X < Y < Z.
std::vector<PauliWord> order_cartan_basis(std::vector<PauliWord> words);

/// Label sets as produced by the recursion, without building matrices.
std::vector<std::string> h_labels(int n);
std::vector<std::string> f_labels(int n);

/// Text dump: one "<SET> <LABEL>" line per element, sets in the order
/// M, K, K0, K1, H, F.
std::string dump_basis(const KGBasis &basis);

}  // namespace khk
