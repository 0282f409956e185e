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

#include "diffden/denoiser.hpp"
#include "diffden/forward.hpp"
#include "diffden/metrics.hpp"
#include "diffden/reverse.hpp"
#include "diffden/rng.hpp"
#include "diffden/schedule.hpp"

using namespace diffden;

namespace {

Image test_image(int side) {
  Image img(side, side);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.pixels[i] = 20.0 + static_cast<double>((i * 37) % 216);
  }
  return img;
}

}  // namespace

static void BM_MarginalGaussian(benchmark::State& state) {
  const Schedule s = build_schedule(GaussianNoise{25.0}, 20);
  const Image x0 = test_image(static_cast<int>(state.range(0)));
  RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_marginal(s, x0, 20, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(x0.size()));
}
BENCHMARK(BM_MarginalGaussian)->Arg(16)->Arg(64);

static void BM_MarginalPoisson(benchmark::State& state) {
  const Schedule s = build_schedule(PoissonNoise{0.2}, 20);
  const Image x0 = test_image(static_cast<int>(state.range(0)));
  RngStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_marginal(s, x0, 1, rng));  // rates up to ~2e4
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(x0.size()));
}
BENCHMARK(BM_MarginalPoisson)->Arg(16)->Arg(64);

static void BM_BridgeGamma(benchmark::State& state) {
  const Schedule s = build_schedule(GammaNoise{26.0}, 20);
  const Image x0 = test_image(16);
  RngStream rng(1, 0);
  const Image x_next = sample_marginal(s, x0, 11, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_bridge(s, x0, x_next, 10, rng));
  }
}
BENCHMARK(BM_BridgeGamma);

static void BM_ReverseChainOracle(benchmark::State& state) {
  const Schedule s = build_schedule(GaussianNoise{25.0}, 10);
  std::vector<Image> atoms;
  for (double level : {100.0, 124.0, 148.0, 172.0}) atoms.emplace_back(4, 4, level);
  const OracleDenoiser oracle(FinitePrior(std::move(atoms), {1, 1, 1, 1}), s);
  RngStream rng(1, 0);
  const Image x_terminal = sample_marginal(s, Image(4, 4, 124.0), 10, rng);
  std::uint64_t chain = 0;
  for (auto _ : state) {
    RngStream chain_rng = rng.fork(chain++);
    benchmark::DoNotOptimize(sample_reverse(s, x_terminal, oracle, chain_rng, false));
  }
}
BENCHMARK(BM_ReverseChainOracle);

static void BM_Ssim(benchmark::State& state) {
  const Image a = test_image(static_cast<int>(state.range(0)));
  Image b = a;
  for (double& p : b.pixels) p = 255.0 - p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssim(a, b));
  }
}
BENCHMARK(BM_Ssim)->Arg(16)->Arg(128);

BENCHMARK_MAIN();
