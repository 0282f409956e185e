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

#ifndef DIFFDEN_DENOISER_HPP_
#define DIFFDEN_DENOISER_HPP_

#include <vector>

#include "diffden/image.hpp"
#include "diffden/schedule.hpp"

namespace diffden {

// The denoiser abstraction f(x_{t+1}, [x_N], t+1) ~ E[x_0 | .]. x_terminal
// is consulted only when needs_terminal() (Poisson: the terminal observation
// cannot be dropped from the conditional). Gamma/Poisson implementations
// clamp outputs to >= kEpsilonFloor so they are usable as Gamma scales and
// Poisson rates.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Image predict(const Image& x_next, const Image* x_terminal, int t_next) const = 0;
  virtual bool needs_terminal() const = 0;
};

// Weighted finite set of candidate clean images: the support of an exact,
// brute-force Bayes posterior. Weights are normalized at construction.
class FinitePrior {
 public:
  FinitePrior(std::vector<Image> atoms, std::vector<double> weights);

  const std::vector<Image>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<Image> atoms_;
  std::vector<double> weights_;
};

// Posterior atom probabilities q(atom_k | observations) with per-pixel
// log-likelihoods accumulated in log space (max-subtraction normalization;
// the sums reach magnitude 1e4). Observations: x_{t+1} alone for
// Gaussian/Gamma; (x_{t+1}, x_N) for Poisson, where
// x_{t+1} | x_N, x_0 ~ (l_N x_N + P((l_{t+1} - l_N) x_0)) / l_{t+1}.
// Throws std::domain_error when every atom has log-likelihood -inf.
std::vector<double> posterior_atom_weights(const FinitePrior& prior, const Schedule& s,
                                           const Image& x_next, const Image* x_terminal,
                                           int t_next);

// E[x_0 | x_{t+1}, [x_N]] over the finite prior: the weighted atom average.
Image oracle_posterior_mean(const FinitePrior& prior, const Schedule& s, const Image& x_next,
                            const Image* x_terminal, int t_next);

// Denoiser backed by the exact posterior mean. The ground-truth reference
// implementation every sampling test measures against.
class OracleDenoiser : public Denoiser {
 public:
  OracleDenoiser(FinitePrior prior, Schedule schedule);

  Image predict(const Image& x_next, const Image* x_terminal, int t_next) const override;
  bool needs_terminal() const override;

  const FinitePrior& prior() const { return prior_; }

 private:
  FinitePrior prior_;
  Schedule schedule_;
};

}  // namespace diffden

#endif  // DIFFDEN_DENOISER_HPP_
