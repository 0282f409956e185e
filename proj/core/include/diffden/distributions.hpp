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

#ifndef DIFFDEN_DISTRIBUTIONS_HPP_
#define DIFFDEN_DISTRIBUTIONS_HPP_

#include <cstdint>
#include <limits>

#include "diffden/rng.hpp"

namespace diffden {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// N(mean, stddev^2) via Box-Muller. stddev = 0 returns mean exactly.
// Throws std::invalid_argument for stddev < 0.
double sample_gaussian(double mean, double stddev, RngStream& rng);

// Unit-scale Gamma(shape, 1), exact for every real shape > 0.
// Marsaglia & Tsang (2000) squeeze-rejection for shape >= 1; the
// G(shape) = G(shape+1) * U^(1/shape) boost for shape < 1.
double sample_gamma(double shape, RngStream& rng);

// Beta(a, b) as X/(X+Y) with X~G(a,1), Y~G(b,1) independent. Open (0,1).
double sample_beta(double a, double b, RngStream& rng);

// Poisson(rate), exact for any finite rate >= 0. Knuth multiplication below
// rate 10, Hormann's PTRS transformed rejection above.
long long sample_poisson(double rate, RngStream& rng);

// Natural-log densities; values outside the support return -infinity.
double log_density_gaussian(double mean, double stddev, double x);
double log_density_gamma(double shape, double x);  // unit scale
double log_pmf_poisson(double rate, long long k);  // rate 0: point mass at 0

// CDFs used by the statistical identity tests.
double normal_cdf(double mean, double stddev, double x);
double gamma_cdf(double shape, double x);  // unit scale

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// series/continued-fraction evaluation accurate to ~1e-12.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

}  // namespace diffden

#endif  // DIFFDEN_DISTRIBUTIONS_HPP_
