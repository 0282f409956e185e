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

#include "diffden/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "diffden/metrics.hpp"

namespace diffden {

LossAndGrad unified_loss(const Image& f_hat, const Image& x0) {
  require_same_shape(f_hat, x0);
  LossAndGrad out;
  out.grad = Image(f_hat.width, f_hat.height);
  for (std::size_t i = 0; i < f_hat.size(); ++i) {
    const double d = f_hat.pixels[i] - x0.pixels[i];
    out.loss += d * d;
    out.grad.pixels[i] = 2.0 * d;
  }
  return out;
}

double kl_minimizer_grid_check(const Schedule& s, int t, double x0,
                               const std::vector<double>& grid) {
  if (t < 1 || t + 1 > s.steps()) {
    throw std::out_of_range("kl_minimizer_grid_check: step (t, t+1) outside schedule");
  }
  if (!(x0 > 0.0)) {
    throw std::invalid_argument("kl_minimizer_grid_check: x0 must be positive");
  }
  bool any_positive = false;
  for (double f : grid) {
    if (f > 0.0) {
      any_positive = true;
      break;
    }
  }
  if (grid.empty() || !any_positive) {
    throw std::invalid_argument("kl_minimizer_grid_check: grid must contain positive values");
  }

  const double p_t = s.param(t);
  const double p_next = s.param(t + 1);
  double best_f = 0.0;
  double best_kl = 0.0;
  bool first = true;
  for (double f : grid) {
    if (!(f > 0.0)) continue;
    double kl = 0.0;
    switch (s.kind()) {
      case NoiseKind::kGaussian: {
        // Equal-covariance Gaussian KL is proportional to (f - x0)^2.
        const double d = f - x0;
        kl = d * d;
        break;
      }
      case NoiseKind::kGamma:
        kl = kl_gamma_scalar(x0, f, p_t - p_next);
        break;
      case NoiseKind::kPoisson:
        kl = kl_poisson_scalar(x0, f, p_t - p_next);
        break;
    }
    if (first || kl < best_kl) {
      best_kl = kl;
      best_f = f;
      first = false;
    }
  }
  return best_f;
}

}  // namespace diffden
