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

#ifndef DIFFDEN_FORWARD_HPP_
#define DIFFDEN_FORWARD_HPP_

#include "diffden/image.hpp"
#include "diffden/rng.hpp"
#include "diffden/schedule.hpp"

namespace diffden {

// Parameters of the Gaussian bridge q(x_t | x_0, x_{t+1}) =
// N(mu_tilde, sigma_tilde^2 I):
//   mu_tilde    = (s_t^2/s_{t+1}^2) x_{t+1} + ((s_{t+1}^2-s_t^2)/s_{t+1}^2) x_0
//   sigma_tilde = (s_t/s_{t+1}) sqrt(s_{t+1}^2 - s_t^2)
// sigma_tilde is a standard deviation; it is zero exactly at t = 0.
struct GaussianBridgeParams {
  Image mu;
  double sigma = 0.0;
};

// One draw from the marginal q(x_t | x_0), t in 1..N:
//   Gaussian: x_0 + s_t z          Gamma: (eta/a_t) x_0, eta ~ G(a_t, 1)
//   Poisson:  P(l_t x_0) / l_t
// x0 must be epsilon-floored for Gamma/Poisson (see floor_pixels).
Image sample_marginal(const Schedule& s, const Image& x0, int t, RngStream& rng);

// One forward Markov step x_t -> x_{t+1}, t in 0..N-1. Gaussian adds
// sqrt(s_{t+1}^2 - s_t^2) z; Gamma uses the G(a_1,1)/a_1 draw at t = 0 and
// Beta(a_{t+1}, a_t - a_{t+1}) thinning afterwards. The Poisson chain is
// oriented from x_N downward and has no upward step: throws
// std::invalid_argument.
Image sample_step(const Schedule& s, const Image& x_t, int t, RngStream& rng);

// Bridge parameters for the Gaussian family, t in 0..N-1 (t = 0 collapses to
// mu = x0, sigma = 0). Throws std::invalid_argument on other families.
GaussianBridgeParams bridge_params_gaussian(const Schedule& s, const Image& x0,
                                            const Image& x_next, int t);

// One draw from the bridge q(x_t | x_0, x_{t+1}), t in 0..N-1:
//   Gaussian: N(mu_tilde, sigma_tilde^2 I)
//   Gamma:    (x_0 tau + a_{t+1} x_{t+1}) / a_t, tau ~ G(a_t - a_{t+1}, 1)
//   Poisson:  (l_{t+1} x_{t+1} + P((l_t - l_{t+1}) x_0)) / l_t
// t = 0 returns x0 exactly for every family.
Image sample_bridge(const Schedule& s, const Image& x0, const Image& x_next, int t,
                    RngStream& rng);

// Reconstructs the integer count lambda*value of a Poisson-grid pixel.
// Throws std::domain_error when the product is further than 1e-6 (relative
// above magnitude 1) from any integer, or negative.
long long poisson_count(double value, double lambda);

}  // namespace diffden

#endif  // DIFFDEN_FORWARD_HPP_
