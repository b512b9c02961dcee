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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "khk/engine.hpp"
#include "khk/factor_tree.hpp"
#include "khk/pauli.hpp"

namespace khk {

/// E_a: ||g - product(tree)||_F. Throws DimMismatch.
double approx_error(const Matrix &g, const FactorTree &tree);

/// E_s: (1/m) * sqrt(sum_i ||[h, h_i]||_F^2) over the m Cartan words.
double subspace_error(const Matrix &h, std::span<const PauliWord> cartan);

/// Haar-distributed element of SU(2^n): QR of a complex Ginibre matrix with
/// the R-diagonal phases pushed into Q, then scaled by det^(-1/2^n).
/// Deterministic for a given seed.
Matrix haar_special_unitary(int n, std::uint64_t seed);

/// Random traceless skew-Hermitian matrix on n qubits with Frobenius norm
/// `norm` (direction uniform on the sphere of su(2^n)).
Matrix random_su_algebra(int n, double norm, std::uint64_t seed);

/// Seed of the index-th sample of a batch seeded with `seed`.
std::uint64_t sample_seed(std::uint64_t seed, std::size_t index);

struct BenchmarkOptions {
  int threads = 1;
  bool keep_trees = false;
};

struct BenchmarkRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double approx_error = 0.0;
  double subspace_error = 0.0;  // mean over the Abelian factors
  double seconds = 0.0;
  std::optional<FactorTree> tree;
};

struct BenchmarkSummary {
  int n = 0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean_approx_error = 0.0;
  double sd_approx_error = 0.0;
  double mean_subspace_error = 0.0;
  double sd_subspace_error = 0.0;
  double mean_seconds = 0.0;
  std::vector<BenchmarkRecord> records;
};

/// Decomposes `count` Haar samples of SU(2^n). Failures are counted, never
/// thrown; statistics run over the successful samples.
BenchmarkSummary run_benchmark(int n, std::size_t count, std::uint64_t seed,
                               const OptimizerConfig &cfg = {}, const Tolerances &tol = {},
                               const BenchmarkOptions &options = {});

/// Aligned table: n, count, mean E_a, mean E_s, sigma E_s, mean seconds, failures.
std::string format_benchmark_table(std::span<const BenchmarkSummary> summaries);

/// The same fields as a JSON document.
std::string benchmark_json(std::span<const BenchmarkSummary> summaries);

}  // namespace khk
