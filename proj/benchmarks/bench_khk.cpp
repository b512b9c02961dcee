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

#include <benchmark/benchmark.h>

#include "khk/bch.hpp"
#include "khk/engine.hpp"
#include "khk/kg_basis.hpp"
#include "khk/linalg.hpp"
#include "khk/metrics.hpp"

namespace khk {
namespace {

void BM_ExpmSkew(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = random_su_algebra(n, 1.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(expm_skew(a));
}
BENCHMARK(BM_ExpmSkew)->DenseRange(2, 6);

void BM_LogmUnitary(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix u = haar_special_unitary(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(logm_unitary(u));
}
BENCHMARK(BM_LogmUnitary)->DenseRange(2, 6);

void BM_BuildBasis(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_kg_basis(n));
}
BENCHMARK(BM_BuildBasis)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_OneLevel(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  cached_kg_basis(n);
  std::uint64_t i = 0;
  for (auto _ : state) {
    const Matrix g = haar_special_unitary(n, sample_seed(3, i++));
    benchmark::DoNotOptimize(decompose_one_level(g, n));
  }
}
BENCHMARK(BM_OneLevel)->DenseRange(3, 4)->Unit(benchmark::kMillisecond);

void BM_DecomposeFull(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    const Matrix g = haar_special_unitary(n, sample_seed(4, i++));
    benchmark::DoNotOptimize(decompose_full(g, n));
  }
}
BENCHMARK(BM_DecomposeFull)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_BchSplit(benchmark::State &state) {
  const auto basis = cached_kg_basis(3);
  const Matrix g = expm_skew(random_su_algebra(3, 0.05, 5));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bch_split(g, *basis));
}
BENCHMARK(BM_BchSplit)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace khk

BENCHMARK_MAIN();
