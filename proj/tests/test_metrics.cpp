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

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "diffden/metrics.hpp"
#include "diffden/rng.hpp"
#include "test_support.hpp"

using namespace diffden;
using diffden::testing::random_image;

namespace {

// Independent PSNR path: accumulate in a different order, no shared code.
double reference_psnr(const Image& a, const Image& b) {
  long double acc = 0.0L;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      const long double d = a.at(x, y) - b.at(x, y);
      acc += d * d;
    }
  }
  const long double mse = acc / (static_cast<long double>(a.width) * a.height);
  if (mse == 0.0L) return std::numeric_limits<double>::infinity();
  return static_cast<double>(10.0L * std::log10(255.0L * 255.0L / mse));
}

// Independent SSIM path: brute-force 2D Gaussian-weighted window statistics,
// no separable filtering, no shared intermediates.
double reference_ssim(const Image& a, const Image& b) {
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

  double weights[kWin][kWin];
  double weight_sum = 0.0;
  for (int dy = 0; dy < kWin; ++dy) {
    for (int dx = 0; dx < kWin; ++dx) {
      const double ry = dy - kWin / 2;
      const double rx = dx - kWin / 2;
      weights[dy][dx] = std::exp(-(rx * rx + ry * ry) / (2.0 * kSigma * kSigma));
      weight_sum += weights[dy][dx];
    }
  }
  for (auto& row : weights) {
    for (double& w : row) w /= weight_sum;
  }

  double total = 0.0;
  int windows = 0;
  for (int y = 0; y + kWin <= a.height; ++y) {
    for (int x = 0; x + kWin <= a.width; ++x) {
      double mu_a = 0.0, mu_b = 0.0;
      for (int dy = 0; dy < kWin; ++dy) {
        for (int dx = 0; dx < kWin; ++dx) {
          mu_a += weights[dy][dx] * a.at(x + dx, y + dy);
          mu_b += weights[dy][dx] * b.at(x + dx, y + dy);
        }
      }
      double var_a = 0.0, var_b = 0.0, cov = 0.0;
      for (int dy = 0; dy < kWin; ++dy) {
        for (int dx = 0; dx < kWin; ++dx) {
          const double da = a.at(x + dx, y + dy) - mu_a;
          const double db = b.at(x + dx, y + dy) - mu_b;
          var_a += weights[dy][dx] * da * da;
          var_b += weights[dy][dx] * db * db;
          cov += weights[dy][dx] * da * db;
        }
      }
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  }
  return total / windows;
}

}  // namespace

TEST_CASE("psnr: sentinel and closed forms") {
  const Image a(8, 8, 120.0);
  CHECK(std::isinf(psnr(a, a)));

  // MSE = 1 -> 20 log10(255).
  Image b = a;
  b.pixels[0] += 8.0;  // one pixel off by 8 in 64 pixels: MSE = 1
  CHECK(psnr(a, b) == doctest::Approx(48.1308036086791).epsilon(1e-12));

  // Uniform offset of 10: MSE = 100.
  Image c = a;
  for (double& p : c.pixels) p += 10.0;
  CHECK(psnr(a, c) == doctest::Approx(28.1308036086791).epsilon(1e-12));

  CHECK_THROWS_AS(psnr(a, Image(4, 4)), std::invalid_argument);
}

TEST_CASE("ssim: identity, symmetry, inversion") {
  RngStream rng(21, 0);
  const Image a = random_image(16, 16, rng);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  const Image b = random_image(16, 16, rng);
  CHECK(ssim(a, b) == ssim(b, a));

  // Binary image against its inversion: structure-dominant, near -1; the
  // reference implementation supplies the exact value.
  Image binary(16, 16);
  for (std::size_t i = 0; i < binary.size(); ++i) {
    binary.pixels[i] = (i % 3 == 0) ? 255.0 : 0.0;
  }
  Image inverted = binary;
  for (double& p : inverted.pixels) p = 255.0 - p;
  const double value = ssim(binary, inverted);
  CHECK(value < -0.5);
  CHECK(value == doctest::Approx(reference_ssim(binary, inverted)).epsilon(1e-6));

  CHECK_THROWS_AS(ssim(Image(10, 16), Image(10, 16)), std::invalid_argument);
}

TEST_CASE("psnr/ssim agree with the independent reference on random pairs") {
  RngStream rng(22, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 11 + static_cast<int>(rng.next_u64() % 22);
    const int h = 11 + static_cast<int>(rng.next_u64() % 22);
    const Image a = random_image(w, h, rng);
    const Image b = random_image(w, h, rng);
    CHECK(psnr(a, b) == doctest::Approx(reference_psnr(a, b)).epsilon(1e-9));
    CHECK(ssim(a, b) == doctest::Approx(reference_ssim(a, b)).epsilon(1e-6));
  }
}

TEST_CASE("kl_gaussian_bridge: closed form and scaling") {
  GaussianBridgeParams q;
  q.mu = Image(1, 1, 1.0);
  q.sigma = 1.0;
  GaussianBridgeParams p;
  p.mu = Image(1, 1, 0.0);
  p.sigma = 1.0;

  const GaussianBridgeKl kl = kl_gaussian_bridge(q, p);
  CHECK(kl.exact == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kl.simplified == doctest::Approx(1.0).epsilon(1e-12));

  // Doubling the mean difference quadruples both values.
  q.mu.pixels[0] = 2.0;
  const GaussianBridgeKl kl2 = kl_gaussian_bridge(q, p);
  CHECK(kl2.exact == doctest::Approx(4.0 * kl.exact).epsilon(1e-12));
  CHECK(kl2.simplified == doctest::Approx(4.0 * kl.simplified).epsilon(1e-12));

  // Equal means: zero.
  const GaussianBridgeKl zero = kl_gaussian_bridge(p, p);
  CHECK(zero.exact == 0.0);
  CHECK(zero.simplified == 0.0);

  p.sigma = 2.0;
  CHECK_THROWS_AS(kl_gaussian_bridge(q, p), std::invalid_argument);
}

TEST_CASE("kl_gamma: closed form, zero at x0, rescale invariance") {
  const Image x0(1, 1, 1.0);
  CHECK(kl_gamma(x0, x0, 8.0, 6.0) == doctest::Approx(0.0).epsilon(1e-15));

  // f = 2 x0, alpha difference 1: ln 2 + 1/2 - 1.
  const Image f(1, 1, 2.0);
  CHECK(kl_gamma(x0, f, 7.0, 6.0) ==
        doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-12));

  // Joint rescaling leaves the value unchanged.
  for (double c : {0.25, 3.0, 100.0}) {
    const Image x0c(1, 1, c);
    const Image fc(1, 1, 2.0 * c);
    CHECK(kl_gamma(x0c, fc, 7.0, 6.0) ==
          doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-12));
  }

  const Image bad(1, 1, 0.0);
  CHECK_THROWS_AS(kl_gamma(x0, bad, 7.0, 6.0), std::domain_error);
  CHECK_THROWS_AS(kl_gamma(x0, f, 6.0, 6.0), std::invalid_argument);
}

TEST_CASE("kl_poisson: closed form and domain") {
  const Image x0(1, 1, 2.0);
  CHECK(kl_poisson(x0, x0, 2.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));

  const Image f(1, 1, 1.0);
  CHECK(kl_poisson(x0, f, 2.0, 1.0) ==
        doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-12));

  const Image bad(1, 1, -1.0);
  CHECK_THROWS_AS(kl_poisson(x0, bad, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(kl_poisson(x0, f, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("compute_metrics bundles both values") {
  RngStream rng(23, 0);
  const Image a = random_image(12, 12, rng);
  const MetricPair pair = compute_metrics(a, a);
  CHECK(std::isinf(pair.psnr_db));
  CHECK(pair.ssim == doctest::Approx(1.0));
}
