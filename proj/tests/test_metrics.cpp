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

#include <json.hpp>

#include "khk/errors.hpp"
#include "khk/metrics.hpp"
#include "support.hpp"

namespace khk {
namespace {

TEST(Haar, SpecialUnitaryAndDeterministic) {
  for (int n = 1; n <= 4; ++n) {
    const Matrix u = haar_special_unitary(n, 42);
    EXPECT_LT(unitarity_defect(u), 1e-12);
    EXPECT_LT(std::abs(u.determinant() - 1.0), 1e-12);
    EXPECT_EQ((haar_special_unitary(n, 42) - u).norm(), 0.0);
  }
  EXPECT_GT((haar_special_unitary(3, 1) - haar_special_unitary(3, 2)).norm(), 1e-3);
}

TEST(Haar, SecondMomentOfAnEntry) {
  // For Haar U(N), |U_00|^2 ~ Beta(1, N-1): mean 1/N, variance (N-1)/(N^2 (N+1)).
  const int samples = 10000;
  const double n = 4.0;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) sum += std::norm(haar_special_unitary(2, sample_seed(3, i))(0, 0));
  const double mean = sum / samples;
  const double se = std::sqrt((n - 1) / (n * n * (n + 1)) / samples);
  EXPECT_NEAR(mean, 1.0 / n, 3.0 * se);
}

TEST(SampleSeed, DistinctAndStable) {
  EXPECT_EQ(sample_seed(7, 3), sample_seed(7, 3));
  EXPECT_NE(sample_seed(7, 3), sample_seed(7, 4));
  EXPECT_NE(sample_seed(7, 3), sample_seed(8, 3));
}

TEST(RandomSuAlgebra, NormAndStructure) {
  const Matrix x = random_su_algebra(3, 0.05, 1);
  EXPECT_NEAR(x.norm(), 0.05, 1e-15);
  EXPECT_TRUE(is_skew_hermitian(x, 1e-15));
  EXPECT_LT(std::abs(x.trace()), 1e-15);
}

TEST(SubspaceError, ZeroInsideAndPositiveOutside) {
  const auto b = cached_kg_basis(3);
  const Matrix inside = combine(b->h_set, std::vector<double>{0.1, -0.2, 0.3, 0.4});
  EXPECT_LT(subspace_error(inside, b->h_set), 1e-15);
  // [u_XYX, u_IIX] and friends by hand: (1/m) sqrt(sum ||[h, h_i]||^2).
  const Matrix out = pauli_word("XYX").matrix();
  double sum = 0.0;
  for (const auto &w : b->h_set) sum += (out * w.matrix() - w.matrix() * out).squaredNorm();
  EXPECT_NEAR(subspace_error(out, b->h_set), std::sqrt(sum) / 4.0, 1e-14);
  EXPECT_GT(subspace_error(out, b->h_set), 0.1);
}

TEST(ApproxError, MatchesDirectDistance) {
  const Matrix g = haar_special_unitary(3, 4);
  FactorTree tree;
  tree.n_total = 3;
  EXPECT_NEAR(approx_error(g, tree), (g - Matrix::Identity(8, 8)).norm(), 1e-14);
  EXPECT_THROW(approx_error(Matrix::Identity(4, 4), tree), Error);
}

TEST(RunBenchmark, SmallBatch) {
  const BenchmarkSummary s = run_benchmark(3, 5, 7);
  EXPECT_EQ(s.count, 5u);
  EXPECT_EQ(s.failures, 0u);
  EXPECT_LE(s.mean_approx_error, 1e-10);
  EXPECT_LE(s.mean_subspace_error, 1e-3);
  ASSERT_EQ(s.records.size(), 5u);
  for (const auto &r : s.records) EXPECT_TRUE(r.ok) << r.error;
}

TEST(RunBenchmark, EmptyBatchAndDeterminism) {
  const BenchmarkSummary empty = run_benchmark(3, 0, 7);
  EXPECT_EQ(empty.count, 0u);
  EXPECT_EQ(empty.failures, 0u);
  const std::string table = format_benchmark_table(std::span<const BenchmarkSummary>(&empty, 1));
  EXPECT_NE(table.find("mean E_a"), std::string::npos);

  BenchmarkOptions threaded;
  threaded.threads = 3;
  const BenchmarkSummary a = run_benchmark(3, 4, 11);
  const BenchmarkSummary b = run_benchmark(3, 4, 11, {}, {}, threaded);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.records[i].seed, b.records[i].seed);
    EXPECT_EQ(a.records[i].approx_error, b.records[i].approx_error);
  }
}

TEST(RunBenchmark, FailuresAreCounted) {
  OptimizerConfig starved;
  starved.max_iters = 1;
  starved.polish_iters = 0;
  starved.restarts = 0;
  const BenchmarkSummary s = run_benchmark(3, 3, 7, starved);
  EXPECT_EQ(s.failures, 3u);
  for (const auto &r : s.records) EXPECT_NE(r.error.find("OptimizerFailed"), std::string::npos);
}

TEST(BenchmarkJson, ParsesBack) {
  const BenchmarkSummary s = run_benchmark(3, 2, 1);
  const auto doc = nlohmann::json::parse(benchmark_json(std::span<const BenchmarkSummary>(&s, 1)));
  ASSERT_EQ(doc.size(), 1u);
  EXPECT_EQ(doc[0]["n"], 3);
  EXPECT_EQ(doc[0]["records"].size(), 2u);
  EXPECT_DOUBLE_EQ(doc[0]["mean_approx_error"].get<double>(), s.mean_approx_error);
}

TEST(RunBenchmark, RejectsSmallRegisters) { EXPECT_THROW(run_benchmark(2, 1, 1), Error); }

}  // namespace
}  // namespace khk
