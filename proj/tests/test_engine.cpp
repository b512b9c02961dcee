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

#include "khk/engine.hpp"
#include "khk/errors.hpp"
#include "khk/metrics.hpp"
#include "support.hpp"

namespace khk {
namespace {

using testing::load_fixture;
using testing::random_in_span;

const KGBasis &basis3() { return *cached_kg_basis(3); }

double coord_of(const AlgebraElement &x, std::span<const PauliWord> words, const std::string &label) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].label() == label) return x.coords.at(i);
  }
  ADD_FAILURE() << "no word " << label;
  return 0.0;
}

// ||a - e^{i phi} b|| minimized over the global phase.
double distance_up_to_phase(const Matrix &a, const Matrix &b) {
  const Complex t = (b.adjoint() * a).trace();
  const double phi = std::abs(t) > 0 ? std::arg(t) : 0.0;
  return (a - std::polar(1.0, phi) * b).norm();
}

Matrix worked_g() { return nearest_special_unitary(load_fixture("worked_G.json")).u; }

TEST(ComputeM, RecoversSmallMElement) {
  const Matrix m0 = 0.1 * pauli_word("XXX").matrix();
  const AlgebraElement m = compute_m(expm_skew(m0), AxisInvolution(3, Axis::Z), basis3().m_set);
  EXPECT_LT((m.matrix - m0).norm(), 1e-12);
  EXPECT_NEAR(coord_of(m, basis3().m_set, "XXX"), 0.1, 1e-12);
}

TEST(ComputeM, VanishesOnTheFixedGroup) {
  std::mt19937_64 rng(1);
  const Matrix k = expm_skew(random_in_span(basis3().k_set, 1.0, rng));
  const AlgebraElement m = compute_m(k, AxisInvolution(3, Axis::Z), basis3().m_set);
  EXPECT_LT(m.matrix.norm(), 1e-12);
}

TEST(ComputeM, WorkedExampleCoordinates) {
  const AlgebraElement m = compute_m(worked_g(), AxisInvolution(3, Axis::Z), basis3().m_set);
  for (std::size_t i = 0; i < basis3().m_set.size(); ++i) {
    const std::string &l = basis3().m_set[i].label();
    const double expected = l == "XXX" ? 1.0 : l == "ZZX" ? -1.0 : 0.0;
    EXPECT_NEAR(m.coords[i], expected, 2e-2) << l;
  }
  // The same element as printed in matrix form.
  EXPECT_LT((m.matrix - load_fixture("worked_m0.json")).norm(), 2e-2 * 8);
}

TEST(ComputeM, RejectsNonUnitary) {
  try {
    compute_m(2.0 * Matrix::Identity(8, 8), AxisInvolution(3, Axis::Z), basis3().m_set);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotUnitary);
  }
}

TEST(ResidualK, ConstructThenRecover) {
  std::mt19937_64 rng(2);
  const AlgebraElement m(random_in_span(basis3().m_set, 0.3, rng));
  EXPECT_LT((residual_k(expm_skew(m.matrix), m) - Matrix::Identity(8, 8)).norm(), 1e-12);
  const Matrix k = expm_skew(random_in_span(basis3().k_set, 1.0, rng));
  const AxisInvolution theta(3, Axis::Z);
  const AlgebraElement found = compute_m(k * expm_skew(m.matrix), theta, basis3().m_set);
  EXPECT_LT((residual_k(k * expm_skew(m.matrix), found) - k).norm(), 1e-12);
}

TEST(ResidualK, WorkedExampleCheckerboard) {
  const Matrix g = worked_g();
  const AlgebraElement m = compute_m(g, AxisInvolution(3, Axis::Z), basis3().m_set);
  const Matrix k00 = residual_k(g, m);
  for (Eigen::Index r = 0; r < 8; ++r) {
    for (Eigen::Index c = 0; c < 8; ++c) {
      if ((r ^ c) & 1) EXPECT_LT(std::abs(k00(r, c)), 1e-12);
    }
  }
  EXPECT_LT((k00 - load_fixture("worked_K00.json")).cwiseAbs().maxCoeff(), 2e-2);
}

TEST(BuildV, PowersOfPi) {
  const AlgebraElement v = build_v(basis3().h_set);
  const Matrix expected = pauli_word("IIX").matrix() + kPi * pauli_word("XXX").matrix() +
                          kPi * kPi * pauli_word("YYX").matrix() +
                          kPi * kPi * kPi * pauli_word("ZZX").matrix();
  EXPECT_LT((v.matrix - expected).norm(), 1e-13);
  const std::vector<PauliWord> one{pauli_word("XYZ")};
  EXPECT_LT((build_v(one).matrix - one[0].matrix()).norm(), 1e-16);
}

TEST(Objective, AnalyticValueAtIdentity) {
  const Matrix v = build_v(basis3().h_set).matrix;
  const Matrix m0 = pauli_word("XXX").matrix() - pauli_word("ZZX").matrix();
  const std::vector<double> theta(basis3().k_set.size(), 0.0);
  const double expected = 16.0 * (-2.0 * kPi + 2.0 * kPi * kPi * kPi);
  EXPECT_NEAR(objective(v, m0, theta, basis3().k_set), expected, 1e-10);
  std::vector<double> random_theta(theta.size());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto &x : random_theta) x = u(rng);
  EXPECT_EQ(objective(v, Matrix::Zero(8, 8), random_theta, basis3().k_set), 0.0);
}

TEST(Objective, GradientMatchesCentralDifferences) {
  const Matrix v = build_v(basis3().h_set).matrix;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 3; ++i) {
    const Matrix m0 = random_in_span(basis3().m_set, 0.5, rng);
    const Matrix k = expm_skew(random_in_span(basis3().k_set, 1.0, rng));
    const Eigen::VectorXd analytic = objective_gradient(v, m0, k, basis3().k_set);
    const Eigen::VectorXd fd = objective_gradient_fd(v, m0, k, basis3().k_set, 1e-6);
    EXPECT_LT((analytic - fd).norm(), 1e-6 * std::max(1.0, analytic.norm()));
  }
}

TEST(MinimizeToCartan, ElementAlreadyInCartan) {
  const Matrix m0 = 0.3 * pauli_word("IIX").matrix();
  const CartanFit fit = minimize_to_cartan(m0, basis3().k_set, basis3().h_set);
  EXPECT_LT(phase_multiset_distance(expm_skew(fit.h.matrix), expm_skew(m0)), 1e-8);
  EXPECT_LE(fit.commutator_rel, 1e-8);
  // Weyl images of 0.3 u_IIX: a single coordinate of magnitude 0.3.
  std::vector<double> mags;
  for (double c : fit.h.coords) mags.push_back(std::abs(c));
  std::sort(mags.begin(), mags.end());
  EXPECT_NEAR(mags.back(), 0.3, 1e-8);
  EXPECT_NEAR(mags[mags.size() - 2], 0.0, 1e-8);
}

TEST(MinimizeToCartan, WorkedExampleSpectrum) {
  const AlgebraElement m = compute_m(worked_g(), AxisInvolution(3, Axis::Z), basis3().m_set);
  const CartanFit fit = minimize_to_cartan(m.matrix, basis3().k_set, basis3().h_set);
  EXPECT_LT(phase_multiset_distance(expm_skew(fit.h.matrix), expm_skew(m.matrix)), 1e-6);
  EXPECT_LE(fit.h.residual_norm.value(), 1e-4);
}

TEST(MinimizeToCartan, ConstructThenRecover) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Matrix h_true = random_in_span(basis3().h_set, 0.7, rng);
    const Matrix k = expm_skew(random_in_span(basis3().k_set, 1.0, rng));
    const Matrix m0 = k * h_true * k.adjoint();
    const CartanFit fit = minimize_to_cartan(m0, basis3().k_set, basis3().h_set);
    EXPECT_LT(phase_multiset_distance(expm_skew(fit.h.matrix), expm_skew(h_true)), 1e-6);
    EXPECT_LT((fit.k1.adjoint() * m0 * fit.k1 - fit.h.matrix).norm(), 1e-9);
    EXPECT_LT((AxisInvolution(3, Axis::Z)(fit.k1) - fit.k1).norm(), 1e-10);
  }
}

TEST(MinimizeToCartan, FailureCarriesBestEffort) {
  std::mt19937_64 rng(6);
  const Matrix m0 = random_in_span(basis3().m_set, 1.0, rng);
  OptimizerConfig cfg;
  cfg.max_iters = 1;
  cfg.polish_iters = 0;
  cfg.restarts = 0;
  try {
    minimize_to_cartan(m0, basis3().k_set, basis3().h_set, cfg);
    FAIL();
  } catch (const OptimizerFailed &e) {
    EXPECT_EQ(e.kind(), ErrorKind::OptimizerFailed);
    EXPECT_GT(e.best().commutator_rel, 1e-8);
    EXPECT_EQ(e.best().k1.rows(), 8);
  }
}

TEST(KhkStage, IdentityAndSingleWord) {
  const AxisInvolution theta(3, Axis::Z);
  const StageResult id = khk_stage(Matrix::Identity(8, 8), theta, basis3().k_set,
                                   basis3().m_set, basis3().h_set);
  EXPECT_LT(id.h.matrix.norm(), 1e-12);
  EXPECT_LT((id.k0 - Matrix::Identity(8, 8)).norm(), 1e-12);

  const Matrix g = expm_skew(pauli_word("XXX").matrix());
  const StageResult s = khk_stage(g, theta, basis3().k_set, basis3().m_set, basis3().h_set);
  const Matrix rebuilt = s.k0 * s.k1 * expm_skew(s.h.matrix) * s.k1.adjoint();
  EXPECT_LT((rebuilt - g).norm(), 1e-10);
}

TEST(KhkStage, HaarInvariants) {
  const AxisInvolution theta(3, Axis::Z);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix g = haar_special_unitary(3, seed);
    const StageResult s = khk_stage(g, theta, basis3().k_set, basis3().m_set, basis3().h_set);
    const Matrix rebuilt = s.k0 * s.k1 * expm_skew(s.h.matrix) * s.k1.adjoint();
    EXPECT_LT((rebuilt - g).norm(), 1e-10);
    EXPECT_LT(s.subspace_error, 1e-3);
    EXPECT_LT((expm_skew(2.0 * s.m.matrix) - theta(g.adjoint()) * g).norm(), 1e-10);
    EXPECT_LT((theta(s.k0) - s.k0).norm(), 1e-10);
    EXPECT_LT((theta(s.k1) - s.k1).norm(), 1e-10);
    EXPECT_LT(phase_multiset_distance(expm_skew(s.h.matrix), expm_skew(s.m.matrix)), 1e-8);
  }
}

TEST(SecondaryMPair, IdentityAndConstructed) {
  const AxisInvolution theta_x(3, Axis::X);
  const std::vector<PauliWord> span = basis3().k1_with_z();
  std::mt19937_64 rng(7);
  const Matrix k00 = expm_skew(random_in_span(basis3().k_set, 1.0, rng));
  const MPair id = secondary_m_pair(k00, Matrix::Identity(8, 8), theta_x, span);
  EXPECT_LT(id.m2.matrix.norm(), 1e-12);

  const Matrix w = random_in_span(basis3().k1_set, 0.1, rng);
  const MPair built = secondary_m_pair(expm_skew(w), Matrix::Identity(8, 8), theta_x, span);
  EXPECT_LT((built.m1.matrix - w).norm(), 1e-12);
}

TEST(SecondaryMPair, WorkedExamplePhaseCoefficient) {
  const Matrix g = worked_g();
  const AlgebraElement m = compute_m(g, AxisInvolution(3, Axis::Z), basis3().m_set);
  const Matrix k00 = residual_k(g, m);
  // The worked example takes K01 = I.
  const MPair pair = secondary_m_pair(k00, Matrix::Identity(8, 8), AxisInvolution(3, Axis::X),
                                      basis3().k1_with_z());
  // -(129/452) i IIZ is -(258/452) in units of (i/2) IIZ.
  EXPECT_NEAR(pair.m1.coords.back(), -258.0 / 452.0, 2e-2);
  EXPECT_LT((pair.m1.matrix - load_fixture("worked_m1.json")).cwiseAbs().maxCoeff(), 2e-2);
}

TEST(PhaseSplit, PureCases) {
  const PauliWord z = basis3().z_word();
  const PhaseSplit zs = phase_split(AlgebraElement(0.7 * z.matrix()), basis3().k1_set, z);
  EXPECT_LT(zs.m_hat.matrix.norm(), 1e-15);
  EXPECT_LT((zs.m_tilde.matrix - 0.7 * z.matrix()).norm(), 1e-15);

  std::mt19937_64 rng(8);
  const Matrix w = random_in_span(basis3().k1_set, 1.0, rng);
  const PhaseSplit ws = phase_split(AlgebraElement(w), basis3().k1_set, z);
  EXPECT_LT(ws.m_tilde.matrix.norm(), 1e-15);
  EXPECT_LT((ws.m_hat.matrix - w).norm(), 1e-14);
}

TEST(PhaseSplit, RejectsOffSpanElements) {
  const PauliWord z = basis3().z_word();
  try {
    phase_split(AlgebraElement(pauli_word("XXX").matrix()), basis3().k1_set, z);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::SubspaceViolation);
  }
}

TEST(PhaseSplit, WorkedExampleLastQubitFactor) {
  const Matrix m1 = load_fixture("worked_m1.json");
  const PhaseSplit s = phase_split(AlgebraElement(m1), basis3().k1_set, basis3().z_word(),
                                   Tolerances{.subspace = 1e-2});
  EXPECT_NEAR(s.m_tilde.coords[0], -258.0 / 452.0, 2e-2);
  const Matrix kt = extract_last_qubit(s.m_tilde, 3);
  EXPECT_NEAR(kt(0, 0).real(), 427.0 / 445.0, 2e-2);
  EXPECT_NEAR(kt(0, 0).imag(), -212.0 / 753.0, 2e-2);
  EXPECT_NEAR(kt(1, 1).real(), 427.0 / 445.0, 2e-2);
  EXPECT_NEAR(kt(1, 1).imag(), 212.0 / 753.0, 2e-2);
}

TEST(ExtractSubunitary, TensorWithIdentity) {
  const Matrix u = haar_special_unitary(2, 9);
  const ExtractedSubUnitary plain = extract_subunitary(kron(u, qubit_identity(1)), 3);
  EXPECT_LT((plain.sub - u).norm(), 1e-14);
  EXPECT_NEAR(plain.phase, 0.0, 1e-14);

  const Matrix shifted = std::polar(1.0, kPi / 4) * u;
  const ExtractedSubUnitary s = extract_subunitary(kron(shifted, qubit_identity(1)), 3);
  EXPECT_LT((s.sub - u).norm(), 1e-13);
  EXPECT_NEAR(s.phase, kPi / 4, 1e-13);
}

TEST(ExtractSubunitary, RejectsGenericMatrix) {
  try {
    extract_subunitary(haar_special_unitary(3, 1), 3);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotTensorWithIdentity);
  }
}

TEST(ExtractSubunitary, WorkedExampleFactors) {
  const Matrix k11 = load_fixture("worked_K11.json");
  const Tolerances loose{.structure = 1e-3};
  const ExtractedSubUnitary k1 = extract_subunitary(k11.adjoint(), 3, loose);
  EXPECT_LT(distance_up_to_phase(k1.sub, load_fixture("worked_K1.json")), 1e-2);

  const Matrix g = worked_g();
  const AlgebraElement m = compute_m(g, AxisInvolution(3, Axis::Z), basis3().m_set);
  const Matrix k00 = residual_k(g, m);
  const MPair pair = secondary_m_pair(k00, Matrix::Identity(8, 8), AxisInvolution(3, Axis::X),
                                      basis3().k1_with_z());
  const Matrix k10 = residual_k(k00, pair.m1);
  const ExtractedSubUnitary k0 = extract_subunitary(k10 * k11, 3, loose);
  EXPECT_LT(distance_up_to_phase(k0.sub, load_fixture("worked_K0.json")), 2e-2);
}

TEST(ExtractLastQubit, AnalyticCases) {
  const PauliWord z = basis3().z_word();
  EXPECT_LT((extract_last_qubit(AlgebraElement(Matrix::Zero(8, 8)), 3) - Matrix::Identity(2, 2)).norm(), 1e-15);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = Complex(0, 1);
  expected(1, 1) = Complex(0, -1);
  EXPECT_LT((extract_last_qubit(AlgebraElement(kPi * z.matrix()), 3) - expected).norm(), 1e-15);
  try {
    extract_last_qubit(AlgebraElement(pauli_word("XXZ").matrix()), 3);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::SubspaceViolation);
  }
}

Matrix level_product(const LevelDecomposition &level) {
  FactorTree tree;
  tree.n_total = level.n;
  tree.phase = level.phase;
  tree.factors = level.factors();
  return product(tree);
}

TEST(DecomposeOneLevel, Identity) {
  const LevelDecomposition level = decompose_one_level(Matrix::Identity(8, 8), 3);
  EXPECT_LT((level_product(level) - Matrix::Identity(8, 8)).norm(), 1e-12);
  EXPECT_LT(level.h0.matrix.norm(), 1e-12);
  EXPECT_EQ(level.factors().size(), 9u);
}

TEST(DecomposeOneLevel, CartanExponentialInput) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 5; ++i) {
    const Matrix h = random_in_span(basis3().h_set, 0.4, rng);
    const Matrix g = expm_skew(h);
    const LevelDecomposition level = decompose_one_level(g, 3);
    EXPECT_LT((level_product(level) - g).norm(), 1e-10);
    EXPECT_LT(phase_multiset_distance(expm_skew(level.h0.matrix), g), 1e-8);
  }
}

TEST(DecomposeOneLevel, FactorInvariants) {
  const AxisInvolution theta_x(3, Axis::X);
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const Matrix g = haar_special_unitary(3, seed);
    const LevelDecomposition level = decompose_one_level(g, 3);
    EXPECT_LT((level_product(level) - g).norm(), 1e-10);
    for (const Matrix &k : level.k) {
      EXPECT_LT(unitarity_defect(k), 1e-10);
      EXPECT_LT(std::abs(k.determinant() - 1.0), 1e-10);
    }
    for (const Matrix &k : level.last_qubit) EXPECT_LT(std::abs(k.determinant() - 1.0), 1e-10);
    EXPECT_LT((expm_skew(2.0 * level.m1.matrix) -
               theta_x((level.k00 * level.k01).adjoint()) * level.k00 * level.k01).norm(), 1e-10);
    EXPECT_LT((expm_skew(2.0 * level.m2.matrix) - theta_x(level.k01) * level.k01.adjoint()).norm(),
              1e-10);
  }
}

TEST(DecomposeOneLevel, WorkedExampleMatrix) {
  const Matrix raw = load_fixture("worked_G.json");
  const LevelDecomposition level = decompose_one_level(worked_g(), 3);
  EXPECT_LT((level_product(level) - raw).norm(), 5e-3);
  EXPECT_LE(level.f0.residual_norm.value(), 1e-4);
  EXPECT_LE(level.h0.residual_norm.value(), 1e-4);
}

TEST(DecomposeFull, TwoQubitLeaf) {
  const Matrix g = haar_special_unitary(2, 1);
  const FactorTree tree = decompose_full(g, 2);
  ASSERT_EQ(tree.factors.size(), 1u);
  EXPECT_EQ(tree.factors[0].kind, FactorKind::SubUnitary);
  EXPECT_LT(tree.report.approx_error, 1e-14);
}

TEST(DecomposeFull, ThreeQubits) {
  const Matrix g = haar_special_unitary(3, 2);
  const FactorTree tree = decompose_full(g, 3);
  EXPECT_EQ(tree.factors.size(), 9u);
  EXPECT_LE(tree.report.approx_error, 1e-10);
  EXPECT_NEAR(tree.report.approx_error, approx_error(g, tree), 1e-12);
}

TEST(DecomposeFull, FourQubitLeaves) {
  const Matrix g = haar_special_unitary(4, 3);
  const FactorTree tree = decompose_full(g, 4);
  EXPECT_LE(tree.report.approx_error, 1e-9);
  EXPECT_EQ(tree.factors.size(), 41u);
  for (const auto &f : tree.factors) {
    switch (f.kind) {
      case FactorKind::SubUnitary:
        EXPECT_EQ(f.level, 3);
        EXPECT_EQ(f.payload.rows(), 4);
        break;
      case FactorKind::LastQubit:
        EXPECT_EQ(f.payload.rows(), 2);
        break;
      case FactorKind::CartanExp:
        EXPECT_TRUE(f.basis_name == "H" + std::to_string(f.level) ||
                    f.basis_name == "F" + std::to_string(f.level));
        break;
      case FactorKind::GlobalPhase:
        ADD_FAILURE() << "unexpected phase factor";
    }
  }
  EXPECT_EQ(tree.report.subspace_errors.size(), 3u + 4u * 3u);
}

TEST(DecomposeFull, ThreadsDoNotChangeTheResult) {
  const Matrix g = haar_special_unitary(4, 4);
  const FactorTree serial = decompose_full(g, 4, {}, {}, 1);
  const FactorTree parallel = decompose_full(g, 4, {}, {}, 4);
  EXPECT_EQ(serial.factors.size(), parallel.factors.size());
  EXPECT_LT((product(serial) - product(parallel)).norm(), 1e-14);
}

TEST(RequireSpecialUnitary, RejectsBadInputs) {
  Tolerances tol;
  EXPECT_NO_THROW(require_special_unitary(haar_special_unitary(3, 1), 3, tol));
  const Matrix scaled = std::polar(1.0, kPi / 8) * Matrix::Identity(8, 8);
  for (const Matrix &bad : {Matrix(2.0 * Matrix::Identity(8, 8)), scaled}) {
    try {
      require_special_unitary(bad, 3, tol);
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::NotUnitary);
    }
  }
  try {
    require_special_unitary(Matrix::Identity(4, 4), 3, tol);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
  }
}

}  // namespace
}  // namespace khk
