// Copyright 2026 The diffden authors
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

#include "diffden/distributions.hpp"
#include "diffden/rng.hpp"

using namespace diffden;

static void BM_RngU64(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.next_u64());
  }
}
BENCHMARK(BM_RngU64);

static void BM_SampleGaussian(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gaussian(0.0, 1.0, rng));
  }
}
BENCHMARK(BM_SampleGaussian);

static void BM_SampleGamma(benchmark::State& state) {
  RngStream rng(1, 0);
  const double shape = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gamma(shape, rng));
  }
}
BENCHMARK(BM_SampleGamma)->Arg(7)->Arg(30)->Arg(260)->Arg(104000);

static void BM_SampleBeta(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_beta(26.0, 78.0, rng));
  }
}
BENCHMARK(BM_SampleBeta);

static void BM_SamplePoisson(benchmark::State& state) {
  RngStream rng(1, 0);
  const double rate = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_poisson(rate, rng));
  }
}
BENCHMARK(BM_SamplePoisson)->Arg(2)->Arg(80)->Arg(2000)->Arg(204000);

BENCHMARK_MAIN();
