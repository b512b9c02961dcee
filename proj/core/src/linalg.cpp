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

#include "khk/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "khk/errors.hpp"

namespace khk {

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

double frobenius_norm(const Matrix &a) { return a.norm(); }

Matrix commutator(const Matrix &a, const Matrix &b) { return a * b - b * a; }

double unitarity_defect(const Matrix &a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a.adjoint() * a - identity(a.rows())).norm();
}

bool is_unitary(const Matrix &a, double tol) {
  return a.rows() == a.cols() && unitarity_defect(a) <= tol;
}
bool is_unitary(const Matrix &a) {
  return is_unitary(a, structural_tol(a.rows()));
}

bool is_skew_hermitian(const Matrix &a, double tol) {
  return a.rows() == a.cols() && (a + a.adjoint()).norm() <= tol;
}
bool is_skew_hermitian(const Matrix &a) {
  return is_skew_hermitian(a, structural_tol(a.rows()));
}

bool is_traceless(const Matrix &a, double tol) {
  return a.rows() == a.cols() && std::abs(a.trace()) <= tol;
}
bool is_traceless(const Matrix &a) {
  return is_traceless(a, structural_tol(a.rows()));
}

Matrix kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix qubit_identity(int qubits) {
  return identity(Eigen::Index{1} << qubits);
}

namespace {

void require_square(const Matrix &a, const char *what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::DimMismatch, std::string(what) + " needs a square matrix");
  }
}

}  // namespace

Matrix expm_skew(const Matrix &a) {
  require_square(a, "expm_skew");
  const double scale = std::max(1.0, a.norm());
  const double defect = (a + a.adjoint()).norm();
  if (defect > structural_tol(a.rows()) * scale) {
    throw Error(ErrorKind::NotSkewHermitian,
                "||a + a^dagger||_F = " + std::to_string(defect));
  }
  // a = i*H with H Hermitian; symmetrize to strip the rounding-level defect.
  Matrix herm = Complex(0, -1) * a;
  herm = (0.5 * (herm + herm.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm);
  const Eigen::VectorXd &lambda = eig.eigenvalues();
  Eigen::VectorXcd phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::polar(1.0, lambda(i));
  }
  const Matrix &v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

Matrix logm_unitary(const Matrix &u, LogmInfo *info) {
  require_square(u, "logm_unitary");
  const double defect = unitarity_defect(u);
  if (defect > structural_tol(u.rows())) {
    throw Error(ErrorKind::NotUnitary,
                "||u^dagger u - I||_F = " + std::to_string(defect));
  }
  // A normal matrix has a diagonal Schur form; its Schur vectors are
  // eigenvectors even when eigenvalues repeat.
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix &t = schur.matrixT();
  const Matrix &q = schur.matrixU();
  Eigen::VectorXcd log_diag(t.rows());
  double closest = 2.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const Complex lambda = t(i, i);
    closest = std::min(closest, std::abs(lambda + 1.0));
    double angle = std::arg(lambda);
    if (angle <= -kPi) angle = kPi;
    log_diag(i) = Complex(0.0, angle);
  }
  if (info != nullptr) {
    info->distance_to_minus_one = closest;
    info->branch_ambiguous = closest < 1e-8;
  }
  Matrix out = q * log_diag.asDiagonal() * q.adjoint();
  return 0.5 * (out - out.adjoint());
}

double real_inner(const Matrix &a, const Matrix &b) {
  // Re tr(a^dagger b) = Re sum_ij conj(a_ij) b_ij
  return (a.array().conjugate() * b.array()).real().sum();
}

Projection project_onto_span(const Matrix &x, std::span<const Matrix> basis) {
  const std::size_t count = basis.size();
  std::vector<double> norms(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (basis[i].rows() != x.rows() || basis[i].cols() != x.cols()) {
      throw Error(ErrorKind::DimMismatch, "basis element dimension differs from x");
    }
    norms[i] = real_inner(basis[i], basis[i]);
    if (norms[i] <= 0.0) {
      throw Error(ErrorKind::NonOrthogonalBasis, "zero basis element");
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double g = real_inner(basis[i], basis[j]);
      if (std::abs(g) > 1e-10 * std::sqrt(norms[i] * norms[j])) {
        throw Error(ErrorKind::NonOrthogonalBasis,
                    "Gram entry (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") = " + std::to_string(g));
      }
    }
  }
  Projection out;
  out.coords.resize(count);
  out.residual = x;
  for (std::size_t i = 0; i < count; ++i) {
    out.coords[i] = real_inner(basis[i], x) / norms[i];
    out.residual -= out.coords[i] * basis[i];
  }
  out.residual_norm = out.residual.norm();
  return out;
}

SpecialUnitaryRepair nearest_special_unitary(const Matrix &a) {
  require_square(a, "nearest_special_unitary");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd &sigma = svd.singularValues();
  if (sigma(sigma.size() - 1) < 1e-12) {
    throw Error(ErrorKind::Singular, "smallest singular value " +
                                         std::to_string(sigma(sigma.size() - 1)));
  }
  Matrix polar = svd.matrixU() * svd.matrixV().adjoint();
  const double phase = std::arg(polar.determinant());
  const double n = static_cast<double>(a.rows());
  SpecialUnitaryRepair out;
  out.phase = phase;
  out.u = std::polar(1.0, -phase / n) * polar;
  return out;
}

std::vector<double> skew_spectrum(const Matrix &a) {
  Matrix herm = Complex(0, -1) * a;
  herm = (0.5 * (herm + herm.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm, Eigen::EigenvaluesOnly);
  std::vector<double> out(eig.eigenvalues().data(),
                          eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> unitary_phases(const Matrix &u) {
  Eigen::ComplexSchur<Matrix> schur(u, false);
  const Matrix &t = schur.matrixT();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(t.rows()));
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    double angle = std::arg(t(i, i));
    if (angle <= -kPi) angle = kPi;
    out.push_back(angle);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double phase_multiset_distance(const Matrix &u, const Matrix &v) {
  const std::vector<double> a = unitary_phases(u);
  const std::vector<double> b = unitary_phases(v);
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimMismatch, "phase multisets of different sizes");
  }
  const std::size_t n = a.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t shift = 0; shift < n; ++shift) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n && worst < best; ++i) {
      const double d = std::remainder(a[i] - b[(i + shift) % n], 2.0 * kPi);
      worst = std::max(worst, std::abs(d));
    }
    best = std::min(best, worst);
  }
  return best;
}

}  // namespace khk
