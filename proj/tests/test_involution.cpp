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

#include <gtest/gtest.h>

#include "khk/errors.hpp"
#include "khk/involution.hpp"
#include "khk/kg_basis.hpp"
#include "khk/metrics.hpp"
#include "support.hpp"

namespace khk {
namespace {

using testing::random_in_span;
using testing::sigma;

// Dense oracle: C a C with C = I^(n-1) (x) sigma.
Matrix conjugate_dense(int n, char letter, const Matrix &a) {
  const Matrix c = kron(qubit_identity(n - 1), sigma(letter));
  return c * a * c;
}

TEST(AxisInvolution, MatchesDenseConjugation) {
  for (int n = 1; n <= 4; ++n) {
    for (auto [axis, letter] : {std::pair{Axis::Z, 'Z'}, std::pair{Axis::X, 'X'}}) {
      const AxisInvolution inv(n, axis);
      const Matrix a = Matrix::Random(inv.conjugator().rows(), inv.conjugator().cols());
      EXPECT_LT((inv(a) - conjugate_dense(n, letter, a)).norm(), 1e-15);
      EXPECT_LT((inv(inv(a)) - a).norm(), 1e-15);
    }
  }
}

TEST(AxisInvolution, RejectsWrongDimension) {
  const AxisInvolution inv(3, Axis::Z);
  try {
    inv(Matrix::Identity(4, 4));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
  }
}

TEST(AxisInvolution, AutomorphismAndHomomorphism) {
  for (auto axis : {Axis::Z, Axis::X}) {
    const AxisInvolution inv(3, axis);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Matrix a = random_su_algebra(3, 1.0, seed), b = random_su_algebra(3, 1.0, seed + 50);
      EXPECT_LT((inv(commutator(a, b)) - commutator(inv(a), inv(b))).norm(), 1e-13);
      const Matrix g = haar_special_unitary(3, seed), h = haar_special_unitary(3, seed + 50);
      EXPECT_LT((inv(g * h) - inv(g) * inv(h)).norm(), 1e-13);
    }
  }
}

TEST(AxisInvolution, FixesKAndInvertsM) {
  const auto basis = cached_kg_basis(3);
  const AxisInvolution theta(3, Axis::Z);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Matrix k = expm_skew(random_in_span(basis->k_set, 1.0, rng));
    EXPECT_LE((theta(k) - k).norm(), 1e-12);
    const Matrix m = expm_skew(random_in_span(basis->m_set, 1.0, rng));
    EXPECT_LE((theta(m) - m.adjoint()).norm(), 1e-12);
  }
}

TEST(Eigensplit, FixedAndNegatedSubspaces) {
  const auto basis = cached_kg_basis(3);
  const AxisInvolution theta(3, Axis::Z);
  std::mt19937_64 rng(5);
  const Matrix k = random_in_span(basis->k_set, 1.0, rng);
  const EigenSplit ks = eigensplit(theta, k);
  EXPECT_LT(ks.minus.matrix.norm(), 1e-15);
  EXPECT_LT((ks.plus.matrix - k).norm(), 1e-15);

  const Matrix xxx = pauli_word("XXX").matrix();
  const EigenSplit ms = eigensplit(theta, xxx);
  EXPECT_LT(ms.plus.matrix.norm(), 1e-15);
  EXPECT_LT((ms.minus.matrix - xxx).norm(), 1e-15);

  const Matrix a = random_su_algebra(3, 1.0, 9);
  const EigenSplit s = eigensplit(theta, a);
  EXPECT_LT((s.plus.matrix + s.minus.matrix - a).norm(), 1e-15);
  EXPECT_LT((theta(s.plus.matrix) - s.plus.matrix).norm(), 1e-15);
  EXPECT_LT((theta(s.minus.matrix) + s.minus.matrix).norm(), 1e-15);
}

}  // namespace
}  // namespace khk
