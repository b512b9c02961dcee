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

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace khk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Default tolerance for structural predicates: 1e-10 scaled by dimension.
inline double structural_tol(Eigen::Index dim) {
  return 1e-10 * static_cast<double>(dim);
}

/// A traceless skew-Hermitian matrix, optionally carrying its coordinates in
/// a named basis together with the Frobenius norm of what the coordinates
/// fail to capture.
struct AlgebraElement {
  Matrix matrix;
  std::optional<std::string> basis_name;
  std::vector<double> coords;
  std::optional<double> residual_norm;

  AlgebraElement() = default;
  explicit AlgebraElement(Matrix m) : matrix(std::move(m)) {}
};

Matrix identity(Eigen::Index dim);
double frobenius_norm(const Matrix &a);
Matrix commutator(const Matrix &a, const Matrix &b);

bool is_unitary(const Matrix &a, double tol);
bool is_unitary(const Matrix &a);
bool is_skew_hermitian(const Matrix &a, double tol);
bool is_skew_hermitian(const Matrix &a);
bool is_traceless(const Matrix &a, double tol);
bool is_traceless(const Matrix &a);
/// ||a^dagger a - I||_F
double unitarity_defect(const Matrix &a);

Matrix kron(const Matrix &a, const Matrix &b);
/// Identity on 2^qubits dimensions.
Matrix qubit_identity(int qubits);

/// exp(a) for skew-Hermitian a, through the Hermitian eigendecomposition of
/// -i*a. Throws NotSkewHermitian when ||a + a^dagger||_F is not small.
Matrix expm_skew(const Matrix &a);

struct LogmInfo {
  bool branch_ambiguous = false;
  // Smallest |lambda + 1| over the eigenvalues of the input.
  double distance_to_minus_one = 2.0;
};

/// Principal logarithm of a unitary matrix. The result is skew-Hermitian with
/// eigenvalue phases in (-pi, pi]. Eigenvalues within 1e-8 of -1 are flagged
/// in `info` rather than rejected.
Matrix logm_unitary(const Matrix &u, LogmInfo *info = nullptr);

struct Projection {
  std::vector<double> coords;
  Matrix residual;
  double residual_norm = 0.0;
};

/// Real inner product <a, b> = Re tr(a^dagger b).
double real_inner(const Matrix &a, const Matrix &b);

/// Orthogonal projection of x onto span(basis) under Re tr(a^dagger b).
/// Throws NonOrthogonalBasis if the Gram matrix is not diagonal.
Projection project_onto_span(const Matrix &x, std::span<const Matrix> basis);

struct SpecialUnitaryRepair {
  Matrix u;
  double phase = 0.0;  // arg det of the polar factor
};

/// Polar unitary factor of `a`, rescaled by exp(-i*phase/N) so det = 1.
/// Throws Singular when the smallest singular value is below 1e-12.
SpecialUnitaryRepair nearest_special_unitary(const Matrix &a);

/// Sorted eigenvalues of the Hermitian matrix -i*a for skew-Hermitian a.
std::vector<double> skew_spectrum(const Matrix &a);

/// Eigenvalue phases of a unitary matrix, sorted, each in (-pi, pi].
std::vector<double> unitary_phases(const Matrix &u);

/// Distance between the eigenvalue-phase multisets of two unitaries: the
/// smallest, over cyclic alignments of the sorted phases, of the largest
/// wrapped phase difference.
double phase_multiset_distance(const Matrix &u, const Matrix &v);

}  // namespace khk
