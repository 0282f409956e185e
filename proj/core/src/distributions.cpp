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

#include "diffden/distributions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace diffden {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

double standard_normal(RngStream& rng) {
  const double u1 = rng.next_open();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Marsaglia & Tsang (2000), "A simple method for generating gamma variables",
// valid for shape >= 1.
double gamma_marsaglia_tsang(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_open();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Knuth's multiplication method; exact, O(rate) draws.
long long poisson_small(double rate, RngStream& rng) {
  const double limit = std::exp(-rate);
  long long k = 0;
  double p = rng.next_open();
  while (p > limit) {
    ++k;
    p *= rng.next_open();
  }
  return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS. Exact for rate >= 10.
long long poisson_ptrs(double rate, RngStream& rng) {
  const double b = 0.931 + 2.53 * std::sqrt(rate);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_rate = std::log(rate);

  for (;;) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_open();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_rate - rate - std::lgamma(k + 1.0)) {
      return static_cast<long long>(kf);
    }
  }
}

}  // namespace

double sample_gaussian(double mean, double stddev, RngStream& rng) {
  if (!(stddev >= 0.0) || !std::isfinite(stddev)) {
    throw std::invalid_argument("sample_gaussian: stddev must be finite and >= 0");
  }
  if (stddev == 0.0) return mean;
  return mean + stddev * standard_normal(rng);
}

double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("sample_gamma: shape must be finite and > 0, got " +
                                std::to_string(shape));
  }
  if (shape >= 1.0) return gamma_marsaglia_tsang(shape, rng);
  // G(a) = G(a+1) * U^(1/a) for a < 1.
  const double boost = gamma_marsaglia_tsang(shape + 1.0, rng);
  return boost * std::pow(rng.next_open(), 1.0 / shape);
}

double sample_beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("sample_beta: parameters must be > 0");
  }
  for (;;) {
    const double x = sample_gamma(a, rng);
    const double y = sample_gamma(b, rng);
    const double r = x / (x + y);
    if (r > 0.0 && r < 1.0) return r;  // re-draw on floating-point endpoint hits
  }
}

long long sample_poisson(double rate, RngStream& rng) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("sample_poisson: rate must be finite and >= 0");
  }
  if (rate == 0.0) return 0;
  if (rate < 10.0) return poisson_small(rate, rng);
  return poisson_ptrs(rate, rng);
}

double log_density_gaussian(double mean, double stddev, double x) {
  if (!(stddev > 0.0)) {
    throw std::invalid_argument("log_density_gaussian: stddev must be > 0");
  }
  const double z = (x - mean) / stddev;
  return -0.5 * z * z - std::log(stddev) - 0.5 * std::log(kTwoPi);
}

double log_density_gamma(double shape, double x) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("log_density_gamma: shape must be > 0");
  }
  if (!(x > 0.0)) return kNegInf;
  return (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
}

double log_pmf_poisson(double rate, long long k) {
  if (!(rate >= 0.0)) {
    throw std::invalid_argument("log_pmf_poisson: rate must be >= 0");
  }
  if (k < 0) return kNegInf;
  if (rate == 0.0) return k == 0 ? 0.0 : kNegInf;
  const double kd = static_cast<double>(k);
  return kd * std::log(rate) - rate - std::lgamma(kd + 1.0);
}

double normal_cdf(double mean, double stddev, double x) {
  if (!(stddev > 0.0)) {
    throw std::invalid_argument("normal_cdf: stddev must be > 0");
  }
  return 0.5 * std::erfc(-(x - mean) / (stddev * std::sqrt(2.0)));
}

double gamma_cdf(double shape, double x) {
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(shape, x);
}

namespace {

// Lower incomplete gamma by series expansion, x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::invalid_argument("regularized_gamma_p: need a > 0, x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::invalid_argument("regularized_gamma_q: need a > 0, x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

}  // namespace diffden
