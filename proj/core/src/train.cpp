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

#include "diffden/train.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "diffden/distributions.hpp"
#include "diffden/errors.hpp"
#include "diffden/forward.hpp"

namespace diffden {

TrainingExample draw_training_example(const std::vector<Image>& dataset, const Schedule& s,
                                      bool conditions_on_terminal, RngStream& rng) {
  if (dataset.empty()) throw std::invalid_argument("training dataset is empty");
  const bool poisson = s.kind() == NoiseKind::kPoisson;
  if (poisson != conditions_on_terminal) {
    throw std::invalid_argument("terminal conditioning must match the Poisson family");
  }

  const std::size_t pick = static_cast<std::size_t>(rng.next_u64() % dataset.size());
  Image x0 = dataset[pick];
  if (s.kind() != NoiseKind::kGaussian) x0 = floor_pixels(x0, kEpsilonFloor);

  TrainingExample example;
  if (poisson) {
    // t from {1..N-1}; x_N marginally, then x_t | x_0, x_N by superposition.
    const int t = 1 + static_cast<int>(rng.next_u64() %
                                       static_cast<std::uint64_t>(s.steps() - 1));
    const Image x_terminal = sample_marginal(s, x0, s.steps(), rng);
    const double l_t = s.param(t);
    const double l_terminal = s.param(s.steps());
    Image x_t(x0.width, x0.height);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      const double increment = static_cast<double>(
          sample_poisson((l_t - l_terminal) * x0.pixels[i], rng));
      x_t.pixels[i] = (l_terminal * x_terminal.pixels[i] + increment) / l_t;
    }
    example.input = make_regressor_input(x_t, &x_terminal, t, s.steps(), true);
  } else {
    const int t = 1 + static_cast<int>(rng.next_u64() %
                                       static_cast<std::uint64_t>(s.steps()));
    const Image x_t = sample_marginal(s, x0, t, rng);
    example.input = make_regressor_input(x_t, nullptr, t, s.steps(), false);
  }
  example.target = scale_to_model(x0).pixels;
  return example;
}

double batch_loss_and_grad(const ToyRegressor& model,
                           const std::vector<TrainingExample>& batch,
                           std::vector<double>& grad) {
  if (batch.empty()) throw std::invalid_argument("batch_loss_and_grad: empty batch");
  grad.assign(model.parameter_count(), 0.0);
  double loss = 0.0;
  for (const TrainingExample& example : batch) {
    loss += model.loss_and_param_grad(example.input, example.target, grad);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  for (double& g : grad) g *= inv;
  return loss;
}

TrainResult train(const std::vector<Image>& dataset, const Schedule& s, ToyRegressor& model,
                  const TrainConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
  if (config.batch < 1) throw std::invalid_argument("train: batch must be >= 1");
  if (config.steps < 0) throw std::invalid_argument("train: steps must be >= 0");
  for (const Image& img : dataset) require_same_shape(dataset.front(), img);
  if (dataset.front().width != model.config().width ||
      dataset.front().height != model.config().height) {
    throw std::invalid_argument("train: dataset dimensions do not match the model");
  }

  const bool terminal = model.config().conditions_on_terminal;
  TrainResult result;
  result.loss_trace.reserve(static_cast<std::size_t>(config.steps));
  std::vector<double> grad;
  std::vector<TrainingExample> batch;
  batch.reserve(static_cast<std::size_t>(config.batch));

  for (int step = 0; step < config.steps; ++step) {
    RngStream step_rng(config.seed, static_cast<std::uint64_t>(step));
    batch.clear();
    for (int b = 0; b < config.batch; ++b) {
      RngStream element_rng = step_rng.fork(static_cast<std::uint64_t>(b));
      batch.push_back(draw_training_example(dataset, s, terminal, element_rng));
    }
    const double loss = batch_loss_and_grad(model, batch, grad);
    if (!std::isfinite(loss)) {
      throw training_error("training diverged (non-finite loss) at step " +
                           std::to_string(step));
    }
    result.loss_trace.push_back(loss);
    std::vector<double>& params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= config.learning_rate * grad[i];
    }
  }
  return result;
}

}  // namespace diffden
