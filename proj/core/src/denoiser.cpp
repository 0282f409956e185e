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

#include "diffden/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "diffden/distributions.hpp"
#include "diffden/forward.hpp"

namespace diffden {

FinitePrior::FinitePrior(std::vector<Image> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw std::invalid_argument("FinitePrior: needs at least one atom");
  if (weights_.size() != atoms_.size()) {
    throw std::invalid_argument("FinitePrior: atom/weight count mismatch");
  }
  for (std::size_t k = 1; k < atoms_.size(); ++k) require_same_shape(atoms_[0], atoms_[k]);
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("FinitePrior: weights must be positive and finite");
    }
    sum += w;
  }
  for (double& w : weights_) w /= sum;
}

namespace {

// log q(observation pixel | atom pixel) for the marginal at time t_next.
double marginal_log_density(const Schedule& s, double atom, double obs, int t_next) {
  switch (s.kind()) {
    case NoiseKind::kGaussian:
      return log_density_gaussian(atom, s.param(t_next), obs);
    case NoiseKind::kGamma: {
      // x = atom * eta / a, eta ~ G(a,1)  =>  density of eta scaled by a/atom.
      const double a = s.param(t_next);
      if (!(atom > 0.0)) return kNegInf;
      const double eta = obs * a / atom;
      if (!(eta > 0.0)) return kNegInf;
      return log_density_gamma(a, eta) + std::log(a / atom);
    }
    case NoiseKind::kPoisson: {
      const double l = s.param(t_next);
      return log_pmf_poisson(l * atom, poisson_count(obs, l));
    }
  }
  return kNegInf;
}

}  // namespace

std::vector<double> posterior_atom_weights(const FinitePrior& prior, const Schedule& s,
                                           const Image& x_next, const Image* x_terminal,
                                           int t_next) {
  if (t_next < 1 || t_next > s.steps()) {
    throw std::out_of_range("posterior_atom_weights: t_next outside 1..N");
  }
  require_same_shape(prior.atoms()[0], x_next);
  const bool poisson = s.kind() == NoiseKind::kPoisson;
  if (poisson && x_terminal == nullptr) {
    throw std::invalid_argument("posterior_atom_weights: Poisson conditioning requires x_N");
  }
  if (poisson) require_same_shape(x_next, *x_terminal);

  const std::size_t n_atoms = prior.atoms().size();
  std::vector<double> log_w(n_atoms);

  // Poisson: precompute the observation counts, shared by all atoms.
  std::vector<long long> terminal_counts;
  std::vector<long long> increment_counts;
  double l_next = 0.0;
  double l_terminal = 0.0;
  if (poisson) {
    l_next = s.param(t_next);
    l_terminal = s.param(s.steps());
    terminal_counts.resize(x_next.size());
    increment_counts.resize(x_next.size());
    for (std::size_t i = 0; i < x_next.size(); ++i) {
      terminal_counts[i] = poisson_count(x_terminal->pixels[i], l_terminal);
      const double product = l_next * x_next.pixels[i] -
                             static_cast<double>(terminal_counts[i]);
      const double rounded = std::round(product);
      if (std::fabs(product - rounded) > 1e-6 * std::max(1.0, std::fabs(product)) ||
          rounded < 0.0) {
        throw std::domain_error(
            "posterior_atom_weights: (x_next, x_N) are not consistent Poisson-grid states");
      }
      increment_counts[i] = static_cast<long long>(rounded);
    }
  }

  for (std::size_t k = 0; k < n_atoms; ++k) {
    const Image& atom = prior.atoms()[k];
    double ll = std::log(prior.weights()[k]);
    if (poisson) {
      const double l_diff = l_next - l_terminal;
      for (std::size_t i = 0; i < x_next.size(); ++i) {
        ll += log_pmf_poisson(l_terminal * atom.pixels[i], terminal_counts[i]);
        ll += log_pmf_poisson(l_diff * atom.pixels[i], increment_counts[i]);
        if (ll == kNegInf) break;
      }
    } else {
      for (std::size_t i = 0; i < x_next.size(); ++i) {
        ll += marginal_log_density(s, atom.pixels[i], x_next.pixels[i], t_next);
        if (ll == kNegInf) break;
      }
    }
    log_w[k] = ll;
  }

  const double max_ll = *std::max_element(log_w.begin(), log_w.end());
  if (max_ll == kNegInf) {
    throw std::domain_error(
        "posterior_atom_weights: every atom has zero likelihood (degenerate evidence)");
  }
  double sum = 0.0;
  std::vector<double> w(n_atoms);
  for (std::size_t k = 0; k < n_atoms; ++k) {
    w[k] = std::exp(log_w[k] - max_ll);
    sum += w[k];
  }
  for (double& v : w) v /= sum;
  return w;
}

Image oracle_posterior_mean(const FinitePrior& prior, const Schedule& s, const Image& x_next,
                            const Image* x_terminal, int t_next) {
  const std::vector<double> w = posterior_atom_weights(prior, s, x_next, x_terminal, t_next);
  Image mean(x_next.width, x_next.height);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Image& atom = prior.atoms()[k];
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean.pixels[i] += w[k] * atom.pixels[i];
    }
  }
  return mean;
}

OracleDenoiser::OracleDenoiser(FinitePrior prior, Schedule schedule)
    : prior_(std::move(prior)), schedule_(std::move(schedule)) {}

Image OracleDenoiser::predict(const Image& x_next, const Image* x_terminal,
                              int t_next) const {
  Image f = oracle_posterior_mean(prior_, schedule_, x_next, x_terminal, t_next);
  if (schedule_.kind() != NoiseKind::kGaussian) {
    f = floor_pixels(f, kEpsilonFloor);
  }
  return f;
}

bool OracleDenoiser::needs_terminal() const {
  return schedule_.kind() == NoiseKind::kPoisson;
}

}  // namespace diffden
