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

#ifndef DIFFDEN_LOSS_HPP_
#define DIFFDEN_LOSS_HPP_

#include <vector>

#include "diffden/image.hpp"
#include "diffden/schedule.hpp"

namespace diffden {

struct LossAndGrad {
  double loss = 0.0;
  Image grad;  // d loss / d f_hat = 2 (f_hat - x0)
};

// Squared L2 over pixels, ||f_hat - x0||^2. Training applies it in the
// scaled [-1,1] domain; the arithmetic itself is domain-agnostic.
LossAndGrad unified_loss(const Image& f_hat, const Image& x0);

// Evaluates the single-pixel bridge KL (Gamma or Poisson expression; Gaussian
// uses the exact quadratic) over a grid of candidate denoiser outputs f and
// returns the grid argmin. The step (t, t+1) of the schedule supplies the
// parameter difference. An executable rendering of the optimality proofs:
// the argmin equals x0 up to grid resolution.
double kl_minimizer_grid_check(const Schedule& s, int t, double x0,
                               const std::vector<double>& grid);

}  // namespace diffden

#endif  // DIFFDEN_LOSS_HPP_
