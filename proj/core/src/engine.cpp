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

#include "khk/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <random>

#include <Eigen/Eigenvalues>

#include "khk/metrics.hpp"

namespace khk {

namespace {

// exp(t*A) for a fixed skew-Hermitian A, sharing one eigendecomposition
// across the trial steps of a line search.
class SkewFlow {
 public:
  explicit SkewFlow(const Matrix &a) {
    Matrix herm = Complex(0, -1) * a;
    herm = (0.5 * (herm + herm.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(herm);
    vectors_ = eig.eigenvectors();
    values_ = eig.eigenvalues();
  }

  Matrix at(double t) const {
    Eigen::VectorXcd phases(values_.size());
    for (Eigen::Index i = 0; i < values_.size(); ++i) phases(i) = std::polar(1.0, t * values_(i));
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

 private:
  Matrix vectors_;
  Eigen::VectorXd values_;
};

Matrix combine_vector(std::span<const PauliWord> words, const Eigen::VectorXd &coeffs) {
  Matrix out = Matrix::Zero(words[0].dim(), words[0].dim());
  for (std::size_t j = 0; j < words.size(); ++j) {
    out += coeffs(static_cast<Eigen::Index>(j)) * words[j].matrix();
  }
  return out;
}

double trace_product_real(const Matrix &a, const Matrix &b) {
  // Re tr(a b)
  return (a.array() * b.transpose().array()).real().sum();
}

// Conjugators whose involution fixes every word of the generating set: the
// optimizer's group lies in their common fixed subgroup.
std::vector<AxisInvolution> fixing_involutions(std::span<const PauliWord> k_basis) {
  std::vector<AxisInvolution> out;
  if (k_basis.empty()) return out;
  const int n = k_basis[0].qubits();
  for (Axis axis : {Axis::Z, Axis::X}) {
    const char letter = axis == Axis::Z ? 'Z' : 'X';
    const bool fixes = std::all_of(k_basis.begin(), k_basis.end(), [&](const PauliWord &w) {
      const char last = w.label().back();
      return last == 'I' || last == letter;
    });
    if (fixes) out.emplace_back(n, axis);
  }
  return out;
}

Matrix repair_in_group(Matrix k, const std::vector<AxisInvolution> &fixing) {
  for (const auto &inv : fixing) k = 0.5 * (k + inv.apply(k));
  return nearest_special_unitary(k).u;
}

double relative_commutator(const Matrix &v, const Matrix &h) {
  const double scale = v.norm() * h.norm();
  if (scale == 0.0) return 0.0;
  return commutator(v, h).norm() / scale;
}

Eigen::VectorXd flatten(const Matrix &a) {
  Eigen::VectorXd out(2 * a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out(2 * i) = a.data()[i].real();
    out(2 * i + 1) = a.data()[i].imag();
  }
  return out;
}

Matrix off_cartan(const Matrix &x, std::span<const PauliWord> cartan) {
  Matrix out = x;
  for (const auto &w : cartan) out -= (w.inner(x) / w.norm_squared()) * w.matrix();
  return out;
}

struct Attempt {
  Matrix k;
  int iterations = 0;
};

// Quasi-Newton (BFGS) descent of the Killing objective in right-translated
// coordinates K exp(sum_j delta_j k_j). Every critical point has
// [v, K^dagger m0 K] = 0, so the descent only has to get close to one.
Attempt descend(const Matrix &v, const Matrix &m0, Matrix k, std::span<const PauliWord> k_basis,
                const OptimizerConfig &cfg) {
  const Eigen::Index d = static_cast<Eigen::Index>(k_basis.size());
  const double c = killing_scale(m0.rows());
  auto value_at = [&](const Matrix &kk) {
    return c * trace_product_real(v, kk.adjoint() * m0 * kk);
  };
  const double initial_scale = 1.0 / (c * v.norm() * m0.norm());
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(d, d) * initial_scale;

  Attempt out;
  Eigen::VectorXd grad = objective_gradient(v, m0, k, k_basis);
  double value = value_at(k);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    out.iterations = iter;
    const Matrix h = k.adjoint() * m0 * k;
    if (relative_commutator(v, h) <= cfg.convergence_tol) break;

    Eigen::VectorXd direction = -inv_hessian * grad;
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      inv_hessian = Eigen::MatrixXd::Identity(d, d) * initial_scale;
      direction = -initial_scale * grad;
      slope = grad.dot(direction);
    }
    const SkewFlow flow(combine_vector(k_basis, direction));
    double t = 1.0;
    Matrix trial;
    double trial_value = 0.0;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack, t *= 0.5) {
      trial = k * flow.at(t);
      trial_value = value_at(trial);
      if (trial_value <= value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const Eigen::VectorXd trial_grad = objective_gradient(v, m0, trial, k_basis);
    const Eigen::VectorXd s = t * direction;
    const Eigen::VectorXd y = trial_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = inv_hessian * y;
      inv_hessian += (rho * rho * y.dot(hy) + rho) * s * s.transpose() -
                     rho * (hy * s.transpose() + s * hy.transpose());
    }
    k = trial;
    grad = trial_grad;
    value = trial_value;
    if (iter % 64 == 63) k = nearest_special_unitary(k).u;
  }
  out.k = std::move(k);
  return out;
}

struct PolishState {
  Matrix k;
  Matrix h;
  Matrix residual;
  double residual_norm = 0.0;
};

PolishState polish_state(const Matrix &m0, Matrix k, std::span<const PauliWord> cartan) {
  PolishState s;
  s.h = k.adjoint() * m0 * k;
  s.residual = off_cartan(s.h, cartan);
  s.residual_norm = s.residual.norm();
  s.k = std::move(k);
  return s;
}

Eigen::MatrixXd polish_jacobian(const PolishState &s, std::span<const PauliWord> k_basis,
                                std::span<const PauliWord> cartan) {
  Eigen::MatrixXd jac(2 * s.h.size(), static_cast<Eigen::Index>(k_basis.size()));
  for (std::size_t j = 0; j < k_basis.size(); ++j) {
    jac.col(static_cast<Eigen::Index>(j)) =
        flatten(off_cartan(k_basis[j].commutator_with(s.h), cartan));
  }
  return jac;
}

// Damped Gauss-Newton on the off-Cartan part of h = K^dagger m0 K. The
// Jacobian column for generator k_j is the off-Cartan part of [h, k_j].
Attempt polish(const Matrix &m0, Matrix k, std::span<const PauliWord> k_basis,
               std::span<const PauliWord> cartan, const OptimizerConfig &cfg) {
  const Eigen::Index d = static_cast<Eigen::Index>(k_basis.size());
  const double floor = 1e-15 * std::max(1.0, m0.norm());
  Attempt out;
  PolishState s = polish_state(m0, std::move(k), cartan);
  double damping = -1.0;
  int stalls = 0;
  for (int iter = 0; iter < cfg.polish_iters && s.residual_norm > floor; ++iter) {
    out.iterations = iter + 1;
    const Eigen::VectorXd r = flatten(s.residual);
    const Eigen::MatrixXd jac = polish_jacobian(s, k_basis, cartan);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd rhs = -jac.transpose() * r;
    if (damping < 0.0) damping = 1e-10 * normal.trace() / static_cast<double>(d);

    bool improved = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd lhs = normal;
      lhs.diagonal().array() += damping;
      const Eigen::VectorXd delta = lhs.ldlt().solve(rhs);
      PolishState trial =
          polish_state(m0, s.k * expm_skew(combine_vector(k_basis, delta)), cartan);
      if (trial.residual_norm < s.residual_norm) {
        stalls = trial.residual_norm > 0.5 * s.residual_norm ? stalls + 1 : 0;
        s = std::move(trial);
        damping = std::max(damping / 10.0, 1e-14 * normal.trace() / static_cast<double>(d));
        improved = true;
        break;
      }
      damping *= 10.0;
    }
    if (!improved || stalls > 3) break;
  }
  out.k = std::move(s.k);
  return out;
}

CartanFit evaluate_fit(const Matrix &v, const Matrix &m0, Matrix k,
                       std::span<const PauliWord> cartan,
                       const std::vector<AxisInvolution> &fixing, const std::string &basis_name) {
  CartanFit fit;
  fit.k1 = repair_in_group(std::move(k), fixing);
  const Matrix h_raw = fit.k1.adjoint() * m0 * fit.k1;
  fit.commutator_rel = relative_commutator(v, h_raw);
  fit.subspace_error = subspace_error(h_raw, cartan);
  Projection proj = project_onto_words(h_raw, cartan);
  fit.h = AlgebraElement(h_raw - proj.residual);
  fit.h.basis_name = basis_name;
  fit.h.coords = std::move(proj.coords);
  fit.h.residual_norm = proj.residual_norm;
  fit.objective = killing_scale(m0.rows()) * trace_product_real(v, fit.h.matrix);
  const std::vector<double> a = skew_spectrum(fit.h.matrix);
  const std::vector<double> b = skew_spectrum(m0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    fit.spectrum_defect = std::max(fit.spectrum_defect, std::abs(a[i] - b[i]));
  }
  return fit;
}

std::string cartan_name(std::span<const PauliWord> cartan) {
  if (cartan.empty()) return "";
  const int n = cartan[0].qubits();
  return (cartan[0].label().back() == 'Z' ? "F" : "H") + std::to_string(n);
}

}  // namespace

AlgebraElement compute_m(const Matrix &g, const AxisInvolution &inv,
                         std::span<const PauliWord> target_span, const Tolerances &tol,
                         LogmInfo *log_info) {
  if (!is_unitary(g, tol.ingest * std::max<double>(1.0, static_cast<double>(g.rows())))) {
    throw Error(ErrorKind::NotUnitary, "compute_m input is not unitary (defect " +
                                           std::to_string(unitarity_defect(g)) + ")");
  }
  const Matrix square = inv.apply(g.adjoint()) * g;
  const Matrix m = 0.5 * logm_unitary(nearest_special_unitary(square).u, log_info);
  Projection proj = project_onto_words(m, target_span);
  if (proj.residual_norm > tol.subspace) {
    throw Error(ErrorKind::SubspaceViolation,
                "logarithm leaves the target span by " + std::to_string(proj.residual_norm));
  }
  AlgebraElement out(m - proj.residual);
  out.coords = std::move(proj.coords);
  out.residual_norm = proj.residual_norm;
  return out;
}

Matrix residual_k(const Matrix &g, const AlgebraElement &m) {
  return g * expm_skew(-m.matrix);
}

AlgebraElement build_v(std::span<const PauliWord> cartan) {
  if (cartan.empty()) throw Error(ErrorKind::DimMismatch, "empty Cartan basis");
  std::vector<double> weights(cartan.size());
  double w = 1.0;
  for (auto &x : weights) {
    x = w;
    w *= kPi;
  }
  AlgebraElement out(combine(cartan, weights));
  out.coords = std::move(weights);
  out.basis_name = cartan_name(cartan);
  out.residual_norm = 0.0;
  return out;
}

double killing_scale(Eigen::Index dim) { return 2.0 * static_cast<double>(dim); }

double objective(const Matrix &v, const Matrix &m0, std::span<const double> theta,
                 std::span<const PauliWord> k_basis) {
  if (theta.size() != k_basis.size()) {
    throw Error(ErrorKind::DimMismatch, "theta and k_basis differ in length");
  }
  const Matrix k = k_basis.empty() ? identity(m0.rows()) : expm_skew(combine(k_basis, theta));
  return killing_scale(m0.rows()) * trace_product_real(v, k.adjoint() * m0 * k);
}

Eigen::VectorXd objective_gradient(const Matrix &v, const Matrix &m0, const Matrix &k,
                                   std::span<const PauliWord> k_basis) {
  // d/dt tr(v e^{-t k_j} h e^{t k_j}) = tr(v [h, k_j]) = tr(k_j [v, h]), and
  // Re tr(k_j x) = -inner(k_j, x) for skew-Hermitian k_j.
  const Matrix h = k.adjoint() * m0 * k;
  const Matrix vh = commutator(v, h);
  const double c = killing_scale(m0.rows());
  Eigen::VectorXd out(static_cast<Eigen::Index>(k_basis.size()));
  for (std::size_t j = 0; j < k_basis.size(); ++j) {
    out(static_cast<Eigen::Index>(j)) = -c * k_basis[j].inner(vh);
  }
  return out;
}

Eigen::VectorXd objective_gradient_fd(const Matrix &v, const Matrix &m0, const Matrix &k,
                                      std::span<const PauliWord> k_basis, double step) {
  const double c = killing_scale(m0.rows());
  auto value_at = [&](const Matrix &kk) {
    return c * trace_product_real(v, kk.adjoint() * m0 * kk);
  };
  Eigen::VectorXd out(static_cast<Eigen::Index>(k_basis.size()));
  for (std::size_t j = 0; j < k_basis.size(); ++j) {
    const Matrix &w = k_basis[j].matrix();
    const double plus = value_at(k * expm_skew(step * w));
    const double minus = value_at(k * expm_skew(-step * w));
    out(static_cast<Eigen::Index>(j)) = (plus - minus) / (2.0 * step);
  }
  return out;
}

CartanFit minimize_to_cartan(const Matrix &m0, std::span<const PauliWord> k_basis,
                             std::span<const PauliWord> cartan, const OptimizerConfig &cfg,
                             const Tolerances &tol) {
  if (k_basis.empty() || cartan.empty()) {
    throw Error(ErrorKind::DimMismatch, "minimize_to_cartan needs nonempty bases");
  }
  const Matrix v = build_v(cartan).matrix;
  const std::vector<AxisInvolution> fixing = fixing_involutions(k_basis);
  const std::string name = cartan_name(cartan);
  const Eigen::Index dim = m0.rows();

  if (m0.norm() < 1e-14) {
    CartanFit fit = evaluate_fit(v, m0, identity(dim), cartan, fixing, name);
    fit.attempts = 1;
    return fit;
  }

  const double spectrum_tol = 1e-8 * std::max(1.0, m0.norm());
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  CartanFit best;
  bool have_best = false;
  int total_iterations = 0;
  for (int attempt = 0; attempt <= cfg.restarts; ++attempt) {
    Matrix start = identity(dim);
    if (attempt > 0) {
      Eigen::VectorXd theta(static_cast<Eigen::Index>(k_basis.size()));
      for (Eigen::Index j = 0; j < theta.size(); ++j) theta(j) = uniform(rng);
      start = expm_skew(combine_vector(k_basis, theta));
    }
    const Attempt coarse = descend(v, m0, std::move(start), k_basis, cfg);
    const Attempt fine = polish(m0, coarse.k, k_basis, cartan, cfg);
    total_iterations += coarse.iterations + fine.iterations;
    CartanFit fit = evaluate_fit(v, m0, fine.k, cartan, fixing, name);
    fit.attempts = attempt + 1;
    fit.iterations = total_iterations;
    const bool ok = fit.commutator_rel <= tol.cartan &&
                    fit.h.residual_norm.value_or(0.0) <= tol.subspace &&
                    fit.spectrum_defect <= spectrum_tol;
    if (ok) return fit;
    if (!have_best || fit.commutator_rel < best.commutator_rel) {
      best = std::move(fit);
      have_best = true;
    }
  }
  throw OptimizerFailed("Cartan conjugation did not converge after " +
                            std::to_string(cfg.restarts + 1) + " attempts (best relative " +
                            "commutator " + std::to_string(best.commutator_rel) + ")",
                        std::move(best));
}

StageResult khk_stage(const Matrix &g, const AxisInvolution &inv,
                      std::span<const PauliWord> k_basis, std::span<const PauliWord> m_span,
                      std::span<const PauliWord> cartan, const OptimizerConfig &cfg,
                      const Tolerances &tol) {
  StageResult out;
  out.m = compute_m(g, inv, m_span, tol);
  out.k0 = residual_k(g, out.m);
  CartanFit fit = minimize_to_cartan(out.m.matrix, k_basis, cartan, cfg, tol);
  out.k1 = std::move(fit.k1);
  out.h = std::move(fit.h);
  out.objective_final = fit.objective;
  out.optimizer_iters = fit.iterations;
  out.subspace_error = fit.subspace_error;
  return out;
}

MPair secondary_m_pair(const Matrix &k00, const Matrix &k01, const AxisInvolution &inv_x,
                       std::span<const PauliWord> span_k1z, const Tolerances &tol) {
  MPair out;
  out.m1 = compute_m(k00 * k01, inv_x, span_k1z, tol);
  out.m2 = compute_m(k01.adjoint(), inv_x, span_k1z, tol);
  return out;
}

PhaseSplit phase_split(const AlgebraElement &m, std::span<const PauliWord> k1_span,
                       const PauliWord &z_word, const Tolerances &tol) {
  std::vector<PauliWord> span(k1_span.begin(), k1_span.end());
  span.push_back(z_word);
  const Projection proj = project_onto_words(m.matrix, span);
  if (proj.residual_norm > tol.subspace) {
    throw Error(ErrorKind::SubspaceViolation,
                "element leaves k1 + span(z) by " + std::to_string(proj.residual_norm));
  }
  PhaseSplit out;
  const double z_coeff = proj.coords.back();
  out.m_tilde = AlgebraElement(z_coeff * z_word.matrix());
  out.m_tilde.coords = {z_coeff};
  out.m_tilde.basis_name = "Z";
  out.m_tilde.residual_norm = 0.0;
  out.m_hat = AlgebraElement(m.matrix - proj.residual - out.m_tilde.matrix);
  out.m_hat.coords.assign(proj.coords.begin(), proj.coords.end() - 1);
  out.m_hat.basis_name = "K1";
  out.m_hat.residual_norm = proj.residual_norm;
  return out;
}

ExtractedSubUnitary extract_subunitary(const Matrix &k, int n, const Tolerances &tol) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (k.rows() != dim || k.cols() != dim) {
    throw Error(ErrorKind::DimMismatch, "extract_subunitary expects a 2^n x 2^n matrix");
  }
  const Eigen::Index half = dim / 2;
  double violation = 0.0;
  Matrix sub(half, half);
  for (Eigen::Index q = 0; q < half; ++q) {
    for (Eigen::Index p = 0; p < half; ++p) {
      const Complex even = k(2 * p, 2 * q);
      violation = std::max({violation, std::abs(k(2 * p + 1, 2 * q)), std::abs(k(2 * p, 2 * q + 1)),
                            std::abs(k(2 * p + 1, 2 * q + 1) - even)});
      sub(p, q) = even;
    }
  }
  if (violation > tol.structure) {
    throw Error(ErrorKind::NotTensorWithIdentity,
                "block pattern violated by " + std::to_string(violation));
  }
  ExtractedSubUnitary out;
  out.phase = std::arg(sub.determinant()) / static_cast<double>(half);
  out.sub = std::polar(1.0, -out.phase) * sub;
  return out;
}

Matrix extract_last_qubit(const AlgebraElement &m_tilde, int n, const Tolerances &tol) {
  const PauliWord z(std::string(static_cast<std::size_t>(n - 1), 'I') + "Z");
  if (m_tilde.matrix.rows() != z.dim()) {
    throw Error(ErrorKind::DimMismatch, "extract_last_qubit dimension mismatch");
  }
  const double alpha = z.inner(m_tilde.matrix) / z.norm_squared();
  const double off = (m_tilde.matrix - alpha * z.matrix()).norm();
  if (off > tol.structure * std::max(1.0, m_tilde.matrix.norm())) {
    throw Error(ErrorKind::SubspaceViolation,
                "phase element is not a multiple of I..IZ (off by " + std::to_string(off) + ")");
  }
  Matrix out = Matrix::Zero(2, 2);
  out(0, 0) = std::polar(1.0, alpha / 2.0);
  out(1, 1) = std::polar(1.0, -alpha / 2.0);
  return out;
}

void require_special_unitary(const Matrix &g, int n, const Tolerances &tol) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (g.rows() != dim || g.cols() != dim) {
    throw Error(ErrorKind::DimMismatch, "expected a " + std::to_string(dim) + "x" +
                                            std::to_string(dim) + " matrix");
  }
  const double scale = std::max(1.0, static_cast<double>(dim));
  const double defect = unitarity_defect(g);
  if (defect > tol.ingest * scale) {
    throw Error(ErrorKind::NotUnitary, "unitarity defect " + std::to_string(defect));
  }
  const double det_defect = std::abs(g.determinant() - 1.0);
  if (det_defect > tol.ingest * scale) {
    throw Error(ErrorKind::NotUnitary, "|det - 1| = " + std::to_string(det_defect));
  }
}

std::vector<Factor> LevelDecomposition::factors(const std::string &prefix) const {
  auto cartan = [&](const AlgebraElement &x, const std::string &basis, const std::string &label,
                    double es) {
    const std::vector<std::string> words =
        basis[0] == 'H' ? h_labels(n) : f_labels(n);
    std::vector<CartanTerm> terms;
    for (std::size_t i = 0; i < words.size(); ++i) terms.push_back({words[i], x.coords[i]});
    Factor f = Factor::cartan_exp(n, basis, std::move(terms), prefix + label);
    f.subspace_residual = x.residual_norm.value_or(0.0);
    f.subspace_error = es;
    return f;
  };
  const std::string nn = std::to_string(n);
  return {
      Factor::sub_unitary(n, k[0], prefix + "K(0)"),
      cartan(f0, "F" + nn, "f(0)", subspace_errors[1]),
      Factor::sub_unitary(n, k[1], prefix + "K(1)"),
      Factor::last_qubit(n, last_qubit[0], prefix + "Kt(0)"),
      cartan(h0, "H" + nn, "h(0)", subspace_errors[0]),
      Factor::sub_unitary(n, k[2], prefix + "K(2)"),
      cartan(f1, "F" + nn, "f(1)", subspace_errors[2]),
      Factor::sub_unitary(n, k[3], prefix + "K(3)"),
      Factor::last_qubit(n, last_qubit[1], prefix + "Kt(1)"),
  };
}

namespace {

Matrix repaired(Matrix k) {
  if (unitarity_defect(k) > 1e-12) return nearest_special_unitary(k).u;
  return k;
}

Matrix level_product(const LevelDecomposition &level) {
  FactorTree tree;
  tree.n_total = level.n;
  tree.phase = level.phase;
  tree.factors = level.factors();
  return product(tree);
}

}  // namespace

LevelDecomposition decompose_one_level(const Matrix &g, int n, const OptimizerConfig &cfg,
                                       const Tolerances &tol) {
  if (n < 3) throw Error(ErrorKind::DimMismatch, "decompose_one_level needs n >= 3");
  require_special_unitary(g, n, tol);
  const auto basis = cached_kg_basis(n);
  const AxisInvolution theta_z(n, Axis::Z);
  const AxisInvolution theta_x(n, Axis::X);

  LevelDecomposition out;
  out.n = n;
  const StageResult stage =
      khk_stage(g, theta_z, basis->k_set, basis->m_set, basis->h_set, cfg, tol);
  out.m0 = stage.m;
  out.k00 = stage.k0;
  out.k01 = stage.k1;
  out.h0 = stage.h;
  out.subspace_errors[0] = stage.subspace_error;
  out.optimizer_iters[0] = stage.optimizer_iters;

  const std::vector<PauliWord> span_k1z = basis->k1_with_z();
  const MPair pair = secondary_m_pair(stage.k0, stage.k1, theta_x, span_k1z, tol);
  out.m1 = pair.m1;
  out.m2 = pair.m2;

  const PauliWord z = basis->z_word();
  const std::array<Matrix, 2> inputs{stage.k0 * stage.k1, Matrix(stage.k1.adjoint())};
  const std::array<const AlgebraElement *, 2> logs{&pair.m1, &pair.m2};
  double phase = 0.0;
  for (std::size_t side = 0; side < 2; ++side) {
    const Matrix outer = residual_k(inputs[side], *logs[side]);
    const PhaseSplit split = phase_split(*logs[side], basis->k1_set, z, tol);
    CartanFit fit = minimize_to_cartan(split.m_hat.matrix, basis->k0_set, basis->f_set, cfg, tol);
    const ExtractedSubUnitary left = extract_subunitary(outer * fit.k1, n, tol);
    const ExtractedSubUnitary right = extract_subunitary(fit.k1.adjoint(), n, tol);
    out.k[2 * side] = repaired(left.sub);
    out.k[2 * side + 1] = repaired(right.sub);
    phase += left.phase + right.phase;
    out.last_qubit[side] = extract_last_qubit(split.m_tilde, n, tol);
    (side == 0 ? out.f0 : out.f1) = std::move(fit.h);
    out.subspace_errors[1 + side] = fit.subspace_error;
    out.optimizer_iters[1 + side] = fit.iterations;
  }
  out.phase = std::remainder(phase, 2.0 * kPi);

  const double error = (level_product(out) - g).norm();
  if (error > tol.reconstruct) {
    throw Error(ErrorKind::ReconstructionFailed,
                "level " + std::to_string(n) + " reproduces its input only to " +
                    std::to_string(error));
  }
  return out;
}

namespace {

struct Partial {
  double phase = 0.0;
  std::vector<Factor> factors;
  std::vector<std::pair<std::string, int>> iterations;
  int levels = 0;
};

Partial decompose_recursive(const Matrix &g, int n, const std::string &prefix,
                            const OptimizerConfig &cfg, const Tolerances &tol, int threads) {
  const LevelDecomposition level = decompose_one_level(g, n, cfg, tol);
  Partial out;
  out.phase = level.phase;
  out.levels = 1;
  out.iterations = {{prefix + "h(0)", level.optimizer_iters[0]},
                    {prefix + "f(0)", level.optimizer_iters[1]},
                    {prefix + "f(1)", level.optimizer_iters[2]}};
  std::vector<Factor> flat = level.factors(prefix);
  if (n - 1 < 3) {
    out.factors = std::move(flat);
    return out;
  }

  // Factors 0, 2, 5, 7 are K(0)..K(3); each is decomposed one level down.
  const std::array<std::size_t, 4> slots{0, 2, 5, 7};
  std::array<Partial, 4> children;
  auto run = [&](std::size_t i) {
    const Factor &f = flat[slots[i]];
    return decompose_recursive(f.payload, n - 1, f.label + "/", cfg, tol, 1);
  };
  if (threads > 1) {
    std::array<std::future<Partial>, 4> jobs;
    for (std::size_t i = 0; i < 4; ++i) jobs[i] = std::async(std::launch::async, run, i);
    for (std::size_t i = 0; i < 4; ++i) children[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < 4; ++i) children[i] = run(i);
  }

  std::size_t next_child = 0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (next_child < 4 && i == slots[next_child]) {
      Partial &child = children[next_child++];
      out.phase += child.phase;
      out.levels += child.levels;
      for (auto &f : child.factors) out.factors.push_back(std::move(f));
      for (auto &it : child.iterations) out.iterations.push_back(std::move(it));
    } else {
      out.factors.push_back(std::move(flat[i]));
    }
  }
  return out;
}

}  // namespace

FactorTree decompose_full(const Matrix &g, int n, const OptimizerConfig &cfg,
                          const Tolerances &tol, int threads) {
  const auto start = std::chrono::steady_clock::now();
  if (n < 2) throw Error(ErrorKind::DimMismatch, "decompose_full needs n >= 2");
  require_special_unitary(g, n, tol);

  FactorTree tree;
  tree.n_total = n;
  int levels = 0;
  if (n == 2) {
    tree.factors.push_back(Factor::sub_unitary(3, g, "K"));
  } else {
    Partial all = decompose_recursive(g, n, "", cfg, tol, threads);
    tree.phase = std::remainder(all.phase, 2.0 * kPi);
    tree.factors = std::move(all.factors);
    tree.report.optimizer_iterations = std::move(all.iterations);
    levels = all.levels;
  }
  for (std::size_t i = 0; i < tree.factors.size(); ++i) {
    Factor &f = tree.factors[i];
    f.order_index = i;
    if (f.kind == FactorKind::CartanExp) {
      tree.report.subspace_errors.emplace_back(f.label, f.subspace_error);
      tree.report.subspace_residuals.emplace_back(f.label, f.subspace_residual);
    }
  }
  tree.report.approx_error = approx_error(g, tree);
  tree.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double tol_total = tol.reconstruct * std::max(1, levels);
  if (tree.report.approx_error > tol_total) {
    throw Error(ErrorKind::ReconstructionFailed,
                "factor product misses the input by " + std::to_string(tree.report.approx_error));
  }
  return tree;
}

}  // namespace khk
