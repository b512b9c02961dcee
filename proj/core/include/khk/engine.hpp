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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "khk/errors.hpp"
#include "khk/factor_tree.hpp"
#include "khk/involution.hpp"
#include "khk/kg_basis.hpp"
#include "khk/linalg.hpp"

namespace khk {

struct OptimizerConfig {
  int max_iters = 2000;
  // Central finite-difference step, used by objective_gradient_fd.
  double gradient_step = 1e-6;
  // Quasi-Newton descent hands over to the polishing phase once the relative
  // commutator ||[v, h]|| / (||v|| ||h||) drops below this.
  double convergence_tol = 1e-7;
  int restarts = 4;
  std::uint64_t seed = 20240917;
  int polish_iters = 60;
};

struct Tolerances {
  double reconstruct = 1e-9;  // per level, Frobenius
  double cartan = 1e-8;       // ||[h, v]|| / (||h|| ||v||)
  double subspace = 1e-3;     // largest projection residual that is repaired
  double structure = 1e-8;    // A (x) I_2 block pattern
  double ingest = 1e-8;       // unitarity / det of decomposition inputs
};

/// m = 1/2 log(Theta(g^dagger) g), projected onto span(target_span) when the
/// off-span residual is at most tol.subspace (residual kept as a diagnostic).
/// Throws NotUnitary or SubspaceViolation.
AlgebraElement compute_m(const Matrix &g, const AxisInvolution &inv,
                         std::span<const PauliWord> target_span,
                         const Tolerances &tol = {}, LogmInfo *log_info = nullptr);

/// g * exp(-m)
Matrix residual_k(const Matrix &g, const AlgebraElement &m);

/// v = sum_i pi^(i-1) u_i over the given (already ordered) Cartan words.
AlgebraElement build_v(std::span<const PauliWord> cartan);

/// Killing-form normalization B(a, b) = 2N tr(ab) on su(N).
double killing_scale(Eigen::Index dim);

/// c_N * Re tr(v K^dagger m0 K) with K = exp(sum_j theta_j k_j).
double objective(const Matrix &v, const Matrix &m0, std::span<const double> theta,
                 std::span<const PauliWord> k_basis);

/// Gradient of delta -> objective at K exp(sum_j delta_j k_j), delta = 0:
/// c_N * Re tr(v [K^dagger m0 K, k_j]).
Eigen::VectorXd objective_gradient(const Matrix &v, const Matrix &m0, const Matrix &k,
                                   std::span<const PauliWord> k_basis);

/// The same gradient by central differences with the given step.
Eigen::VectorXd objective_gradient_fd(const Matrix &v, const Matrix &m0, const Matrix &k,
                                      std::span<const PauliWord> k_basis, double step);

struct CartanFit {
  Matrix k1;
  AlgebraElement h;           // projected; coords over the Cartan words
  double objective = 0.0;
  int iterations = 0;         // descent + polish, summed over attempts
  int attempts = 0;
  double commutator_rel = 0.0;
  double subspace_error = 0.0;  // E_s of h before projection
  double spectrum_defect = 0.0;
};

class OptimizerFailed : public Error {
 public:
  OptimizerFailed(const std::string &what, CartanFit best)
      : Error(ErrorKind::OptimizerFailed, what), best_(std::move(best)) {}
  const CartanFit &best() const noexcept { return best_; }

 private:
  CartanFit best_;
};

/// Finds k1 in exp(span k_basis) with h = k1^dagger m0 k1 in span(cartan), by
/// descending the Killing objective and then polishing the off-Cartan part of
/// h with damped Gauss-Newton steps. The first attempt starts at k1 = I,
/// later ones at seeded random points.
CartanFit minimize_to_cartan(const Matrix &m0, std::span<const PauliWord> k_basis,
                             std::span<const PauliWord> cartan,
                             const OptimizerConfig &cfg = {}, const Tolerances &tol = {});

struct StageResult {
  Matrix k0;
  Matrix k1;
  AlgebraElement h;
  AlgebraElement m;
  double objective_final = 0.0;
  int optimizer_iters = 0;
  double subspace_error = 0.0;
};

StageResult khk_stage(const Matrix &g, const AxisInvolution &inv,
                      std::span<const PauliWord> k_basis, std::span<const PauliWord> m_span,
                      std::span<const PauliWord> cartan, const OptimizerConfig &cfg = {},
                      const Tolerances &tol = {});

struct MPair {
  AlgebraElement m1;  // 1/2 log(Theta_X((k00 k01)^dagger) k00 k01)
  AlgebraElement m2;  // 1/2 log(Theta_X(k01) k01^dagger)
};

MPair secondary_m_pair(const Matrix &k00, const Matrix &k01, const AxisInvolution &inv_x,
                       std::span<const PauliWord> span_k1z, const Tolerances &tol = {});

struct PhaseSplit {
  AlgebraElement m_hat;    // projection onto span(k1_span)
  AlgebraElement m_tilde;  // the remaining multiple of z_word
};

PhaseSplit phase_split(const AlgebraElement &m, std::span<const PauliWord> k1_span,
                       const PauliWord &z_word, const Tolerances &tol = {});

struct ExtractedSubUnitary {
  Matrix sub;
  double phase = 0.0;
};

/// Reads A off a matrix of the form A (x) I_2 (rows/columns 0, 2, 4, ...) and
/// strips its determinant phase. Throws NotTensorWithIdentity.
ExtractedSubUnitary extract_subunitary(const Matrix &k, int n, const Tolerances &tol = {});

/// exp of the top-left 2x2 block of m_tilde = (i*alpha/2) I^(n-1) (x) Z.
Matrix extract_last_qubit(const AlgebraElement &m_tilde, int n, const Tolerances &tol = {});

// One level of the recursion:
//   g = exp(i*phase) (K0 (x) I) e^f0 (K1 (x) I) (I (x) Kt0) e^h0
//                    (K2 (x) I) e^f1 (K3 (x) I) (I (x) Kt1)
struct LevelDecomposition {
  int n = 0;
  std::array<Matrix, 4> k;
  std::array<Matrix, 2> last_qubit;
  AlgebraElement h0, f0, f1;
  std::array<double, 3> subspace_errors{};  // h0, f0, f1 before projection
  std::array<int, 3> optimizer_iters{};
  double phase = 0.0;
  // Intermediates, kept for diagnostics and tests.
  AlgebraElement m0, m1, m2;
  Matrix k00, k01;

  /// The nine factors at level n (no phase factor), labels prefixed.
  std::vector<Factor> factors(const std::string &prefix = "") const;
};

LevelDecomposition decompose_one_level(const Matrix &g, int n, const OptimizerConfig &cfg = {},
                                       const Tolerances &tol = {});

/// Recursive decomposition down to SU(4) leaves. `threads` > 1 lets the four
/// sibling sub-decompositions of a level run concurrently.
FactorTree decompose_full(const Matrix &g, int n, const OptimizerConfig &cfg = {},
                          const Tolerances &tol = {}, int threads = 1);

/// Throws NotUnitary unless g is in SU(2^n) within tol.ingest.
void require_special_unitary(const Matrix &g, int n, const Tolerances &tol);

}  // namespace khk
