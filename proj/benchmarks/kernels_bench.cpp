// Copyright 2026 The AMCC Authors. All Rights Reserved.
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

#include <random>

#include "amcc/linalg.hpp"

namespace amcc {
namespace {

Matrix random_square(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  }
  return m;
}

void BM_EmpiricalHsic(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0));
  const Matrix x = random_square(n, rng), y = random_square(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_hsic(x, y));
}
BENCHMARK(BM_EmpiricalHsic)->RangeMultiplier(2)->Range(4, 64);

void BM_ProjectRowSimplex(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0));
  const Vector v = random_square(n, rng).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(project_row_simplex(v));
}
BENCHMARK(BM_ProjectRowSimplex)->RangeMultiplier(4)->Range(4, 256);

void BM_SolveSpd(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  const Matrix b = random_square(n, rng);
  const Matrix a = b * b.transpose() + Matrix::Identity(n, n);
  const Matrix rhs = random_square(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd_system(a, rhs));
}
BENCHMARK(BM_SolveSpd)->RangeMultiplier(2)->Range(4, 64);

}  // namespace
}  // namespace amcc
