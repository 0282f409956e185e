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

#ifndef DIFFDEN_TRAIN_HPP_
#define DIFFDEN_TRAIN_HPP_

#include <cstdint>
#include <vector>

#include "diffden/image.hpp"
#include "diffden/regressor.hpp"
#include "diffden/rng.hpp"
#include "diffden/schedule.hpp"

namespace diffden {

struct TrainConfig {
  int steps = 2000;
  int batch = 16;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::vector<double> loss_trace;  // mean batch loss per step
};

// One corrupted training example in the scaled domain.
struct TrainingExample {
  std::vector<double> input;   // regressor input (scaled pixels + t/N)
  std::vector<double> target;  // scaled x_0 pixels
};

// Draws one example per the family's listing: pick x0 from the dataset,
// t ~ U{1..N} with x_t from the marginal (Gaussian/Gamma), or t ~ U{1..N-1}
// with x_N from the marginal and x_t from the composed bridge given
// (x_0, x_N) (Poisson). Clean images are epsilon-floored for Gamma/Poisson.
TrainingExample draw_training_example(const std::vector<Image>& dataset, const Schedule& s,
                                      bool conditions_on_terminal, RngStream& rng);

// Mean sum-L2 loss over a fixed batch plus its parameter gradient; the
// deterministic objective the SGD loop and the finite-difference checks
// share.
double batch_loss_and_grad(const ToyRegressor& model,
                           const std::vector<TrainingExample>& batch,
                           std::vector<double>& grad);

// Plain SGD on the unified objective. Deterministic given config.seed.
// Throws training_error naming the step if the loss stops being finite.
TrainResult train(const std::vector<Image>& dataset, const Schedule& s, ToyRegressor& model,
                  const TrainConfig& config);

}  // namespace diffden

#endif  // DIFFDEN_TRAIN_HPP_
