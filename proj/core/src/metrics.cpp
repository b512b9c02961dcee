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

#include "khk/metrics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>

#include <Eigen/QR>
#include <json.hpp>

#include "khk/errors.hpp"

namespace khk {

double approx_error(const Matrix &g, const FactorTree &tree) {
  const Eigen::Index dim = Eigen::Index{1} << tree.n_total;
  if (g.rows() != dim || g.cols() != dim) {
    throw Error(ErrorKind::DimMismatch, "matrix and factor tree act on different registers");
  }
  return (g - product(tree)).norm();
}

double subspace_error(const Matrix &h, std::span<const PauliWord> cartan) {
  if (cartan.empty()) return 0.0;
  double sum = 0.0;
  for (const auto &w : cartan) sum += w.commutator_with(h).squaredNorm();
  return std::sqrt(sum) / static_cast<double>(cartan.size());
}

Matrix haar_special_unitary(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DimMismatch, "haar_special_unitary needs n >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix z(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) z(r, c) = Complex(normal(rng), normal(rng));
  }
  const Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix &r = qr.matrixQR();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  const double angle = std::arg(q.determinant());
  return std::polar(1.0, -angle / static_cast<double>(dim)) * q;
}

Matrix random_su_algebra(int n, double norm, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DimMismatch, "random_su_algebra needs n >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix a(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) a(r, c) = Complex(normal(rng), normal(rng));
  }
  Matrix x = 0.5 * (a - a.adjoint());
  x -= (x.trace() / static_cast<double>(dim)) * Matrix::Identity(dim, dim);
  const double current = x.norm();
  return current > 0.0 ? Matrix((norm / current) * x) : x;
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finalizer
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

BenchmarkRecord run_one(int n, std::size_t index, std::uint64_t seed, const OptimizerConfig &cfg,
                        const Tolerances &tol, bool keep_tree) {
  BenchmarkRecord rec;
  rec.index = index;
  rec.seed = sample_seed(seed, index);
  const auto start = std::chrono::steady_clock::now();
  try {
    const Matrix g = haar_special_unitary(n, rec.seed);
    FactorTree tree = decompose_full(g, n, cfg, tol, 1);
    rec.ok = true;
    rec.approx_error = tree.report.approx_error;
    rec.subspace_error = tree.report.mean_subspace_error();
    if (keep_tree) rec.tree = std::move(tree);
  } catch (const std::exception &e) {
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

void mean_sd(const std::vector<double> &xs, double &mean, double &sd) {
  mean = sd = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  for (double x : xs) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(xs.size() - 1));
}

}  // namespace

BenchmarkSummary run_benchmark(int n, std::size_t count, std::uint64_t seed,
                               const OptimizerConfig &cfg, const Tolerances &tol,
                               const BenchmarkOptions &options) {
  if (n < 3) throw Error(ErrorKind::DimMismatch, "benchmarks need n >= 3");
  BenchmarkSummary out;
  out.n = n;
  out.count = count;
  out.records.resize(count);
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, options.threads)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      out.records[i] = run_one(n, i, seed, cfg, tol, options.keep_trees);
    }
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          out.records[i] = run_one(n, i, seed, cfg, tol, options.keep_trees);
        }
      }));
    }
    for (auto &j : jobs) j.get();
  }

  std::vector<double> ea, es;
  double seconds = 0.0;
  for (const auto &rec : out.records) {
    seconds += rec.seconds;
    if (!rec.ok) {
      ++out.failures;
      continue;
    }
    ea.push_back(rec.approx_error);
    es.push_back(rec.subspace_error);
  }
  mean_sd(ea, out.mean_approx_error, out.sd_approx_error);
  mean_sd(es, out.mean_subspace_error, out.sd_subspace_error);
  if (count > 0) out.mean_seconds = seconds / static_cast<double>(count);
  return out;
}

std::string format_benchmark_table(std::span<const BenchmarkSummary> summaries) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%3s %7s %12s %12s %12s %10s %8s\n", "n", "count", "mean E_a",
                "mean E_s", "sd E_s", "sec/mat", "failed");
  out += buf;
  for (const auto &s : summaries) {
    std::snprintf(buf, sizeof buf, "%3d %7zu %12.3e %12.3e %12.3e %10.3f %8zu\n", s.n, s.count,
                  s.mean_approx_error, s.mean_subspace_error, s.sd_subspace_error, s.mean_seconds,
                  s.failures);
    out += buf;
  }
  return out;
}

std::string benchmark_json(std::span<const BenchmarkSummary> summaries) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto &s : summaries) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto &r : s.records) {
      nlohmann::json rec = {{"index", r.index},
                            {"seed", r.seed},
                            {"ok", r.ok},
                            {"approx_error", r.approx_error},
                            {"subspace_error", r.subspace_error},
                            {"seconds", r.seconds}};
      if (!r.ok) rec["error"] = r.error;
      records.push_back(std::move(rec));
    }
    doc.push_back({{"n", s.n},
                   {"count", s.count},
                   {"failures", s.failures},
                   {"mean_approx_error", s.mean_approx_error},
                   {"sd_approx_error", s.sd_approx_error},
                   {"mean_subspace_error", s.mean_subspace_error},
                   {"sd_subspace_error", s.sd_subspace_error},
                   {"mean_seconds", s.mean_seconds},
                   {"records", std::move(records)}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace khk
