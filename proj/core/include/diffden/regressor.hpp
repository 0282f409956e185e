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

#ifndef DIFFDEN_REGRESSOR_HPP_
#define DIFFDEN_REGRESSOR_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "diffden/denoiser.hpp"
#include "diffden/image.hpp"
#include "diffden/schedule.hpp"

namespace diffden {

// Desk-scale denoising regressor: a fully connected tanh net with two
// hidden layers. Input is the flattened scaled image(s) plus the normalized
// time feature t/N; output is the flattened scaled estimate of x_0. The
// reverse process is architecture-agnostic, so anything implementing
// Denoiser can replace it.
struct RegressorConfig {
  int width = 0;
  int height = 0;
  int hidden = 256;
  bool conditions_on_terminal = false;  // Poisson: x_N joins the input

  int input_dim() const { return width * height * (conditions_on_terminal ? 2 : 1) + 1; }
  int output_dim() const { return width * height; }
};

class ToyRegressor {
 public:
  ToyRegressor(const RegressorConfig& config, std::uint64_t init_seed);

  const RegressorConfig& config() const { return config_; }
  std::uint64_t init_seed() const { return init_seed_; }

  std::size_t parameter_count() const { return params_.size(); }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  // Forward pass on an assembled input vector (scaled domain).
  std::vector<double> forward(std::span<const double> input) const;

  // Sum-L2 loss against target plus its gradient w.r.t. every parameter,
  // accumulated into grad (same length as parameters). Returns the loss.
  double loss_and_param_grad(std::span<const double> input, std::span<const double> target,
                             std::span<double> grad) const;

 private:
  RegressorConfig config_;
  std::uint64_t init_seed_ = 0;
  std::vector<double> params_;

  // Parameter layout offsets: [W1 b1 W2 b2 W3 b3].
  std::size_t w1() const { return 0; }
  std::size_t b1() const;
  std::size_t w2() const;
  std::size_t b2() const;
  std::size_t w3() const;
  std::size_t b3() const;
};

// Builds the scaled regressor input: flattened scale_to_model(x_next),
// then flattened scale_to_model(x_terminal) when the model conditions on it,
// then t_next/N. Shared by training and prediction.
std::vector<double> make_regressor_input(const Image& x_next, const Image* x_terminal,
                                         int t_next, int steps, bool conditions_on_terminal);

// A trained regressor bound to its schedule, usable as the reverse-process
// denoiser. Scales inputs, appends the time feature, scales the output back
// to [0,255], and clamps to kEpsilonFloor for Gamma/Poisson.
class TrainedDenoiser : public Denoiser {
 public:
  TrainedDenoiser(ToyRegressor model, Schedule schedule);

  Image predict(const Image& x_next, const Image* x_terminal, int t_next) const override;
  bool needs_terminal() const override;

  const ToyRegressor& model() const { return model_; }
  const Schedule& schedule() const { return schedule_; }

 private:
  ToyRegressor model_;
  Schedule schedule_;
};

// Checkpoint container: the little-endian binary model plus a plain-text
// key=value metadata block (family, terminal parameter, N, seed, ...).
//
// Layout: magic "DFDN", u32 version, u32 metadata length, metadata bytes,
// u32 dim count, u32 dims[input, hidden, hidden, output], u64 parameter
// count, f64 parameters.
struct Checkpoint {
  ToyRegressor model;
  std::map<std::string, std::string> metadata;
};

void save_checkpoint(const ToyRegressor& model,
                     const std::map<std::string, std::string>& metadata,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Standard metadata block for a model trained against a schedule.
std::map<std::string, std::string> checkpoint_metadata(const Schedule& s, std::uint64_t seed);

// Rebuilds the schedule recorded in checkpoint metadata and verifies it
// matches the model's input layout. Throws std::invalid_argument on
// malformed metadata.
Schedule schedule_from_metadata(const std::map<std::string, std::string>& metadata);

}  // namespace diffden

#endif  // DIFFDEN_REGRESSOR_HPP_
