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

#include "diffden/regressor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "diffden/errors.hpp"
#include "diffden/rng.hpp"
#include "diffden/format.hpp"

namespace diffden {

namespace {

void require_positive_dims(const RegressorConfig& config) {
  if (config.width <= 0 || config.height <= 0 || config.hidden <= 0) {
    throw std::invalid_argument("ToyRegressor: dimensions must be positive");
  }
}

// Xavier/Glorot uniform bound.
double init_bound(int fan_in, int fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

std::size_t ToyRegressor::b1() const {
  return static_cast<std::size_t>(config_.hidden) * config_.input_dim();
}
std::size_t ToyRegressor::w2() const { return b1() + config_.hidden; }
std::size_t ToyRegressor::b2() const {
  return w2() + static_cast<std::size_t>(config_.hidden) * config_.hidden;
}
std::size_t ToyRegressor::w3() const { return b2() + config_.hidden; }
std::size_t ToyRegressor::b3() const {
  return w3() + static_cast<std::size_t>(config_.output_dim()) * config_.hidden;
}

ToyRegressor::ToyRegressor(const RegressorConfig& config, std::uint64_t init_seed)
    : config_(config), init_seed_(init_seed) {
  require_positive_dims(config_);
  const std::size_t total = b3() + config_.output_dim();
  params_.assign(total, 0.0);

  RngStream rng(init_seed, /*stream_id=*/0x1217);
  const double bound1 = init_bound(config_.input_dim(), config_.hidden);
  for (std::size_t i = w1(); i < b1(); ++i) {
    params_[i] = bound1 * (2.0 * rng.next_double() - 1.0);
  }
  const double bound2 = init_bound(config_.hidden, config_.hidden);
  for (std::size_t i = w2(); i < b2(); ++i) {
    params_[i] = bound2 * (2.0 * rng.next_double() - 1.0);
  }
  const double bound3 = init_bound(config_.hidden, config_.output_dim());
  for (std::size_t i = w3(); i < b3(); ++i) {
    params_[i] = bound3 * (2.0 * rng.next_double() - 1.0);
  }
  // Biases start at zero.
}

std::vector<double> ToyRegressor::forward(std::span<const double> input) const {
  const int in_dim = config_.input_dim();
  const int hidden = config_.hidden;
  const int out_dim = config_.output_dim();
  if (static_cast<int>(input.size()) != in_dim) {
    throw std::invalid_argument("ToyRegressor::forward: input size mismatch");
  }
  std::vector<double> h1(hidden);
  for (int j = 0; j < hidden; ++j) {
    double acc = params_[b1() + j];
    const double* row = &params_[w1() + static_cast<std::size_t>(j) * in_dim];
    for (int i = 0; i < in_dim; ++i) acc += row[i] * input[i];
    h1[j] = std::tanh(acc);
  }
  std::vector<double> h2(hidden);
  for (int j = 0; j < hidden; ++j) {
    double acc = params_[b2() + j];
    const double* row = &params_[w2() + static_cast<std::size_t>(j) * hidden];
    for (int i = 0; i < hidden; ++i) acc += row[i] * h1[i];
    h2[j] = std::tanh(acc);
  }
  std::vector<double> out(out_dim);
  for (int j = 0; j < out_dim; ++j) {
    double acc = params_[b3() + j];
    const double* row = &params_[w3() + static_cast<std::size_t>(j) * hidden];
    for (int i = 0; i < hidden; ++i) acc += row[i] * h2[i];
    out[j] = acc;
  }
  return out;
}

double ToyRegressor::loss_and_param_grad(std::span<const double> input,
                                         std::span<const double> target,
                                         std::span<double> grad) const {
  const int in_dim = config_.input_dim();
  const int hidden = config_.hidden;
  const int out_dim = config_.output_dim();
  if (static_cast<int>(input.size()) != in_dim ||
      static_cast<int>(target.size()) != out_dim ||
      grad.size() != params_.size()) {
    throw std::invalid_argument("ToyRegressor::loss_and_param_grad: size mismatch");
  }

  // Forward with cached activations.
  std::vector<double> h1(hidden), h2(hidden), out(out_dim);
  for (int j = 0; j < hidden; ++j) {
    double acc = params_[b1() + j];
    const double* row = &params_[w1() + static_cast<std::size_t>(j) * in_dim];
    for (int i = 0; i < in_dim; ++i) acc += row[i] * input[i];
    h1[j] = std::tanh(acc);
  }
  for (int j = 0; j < hidden; ++j) {
    double acc = params_[b2() + j];
    const double* row = &params_[w2() + static_cast<std::size_t>(j) * hidden];
    for (int i = 0; i < hidden; ++i) acc += row[i] * h1[i];
    h2[j] = std::tanh(acc);
  }
  double loss = 0.0;
  std::vector<double> d_out(out_dim);
  for (int j = 0; j < out_dim; ++j) {
    double acc = params_[b3() + j];
    const double* row = &params_[w3() + static_cast<std::size_t>(j) * hidden];
    for (int i = 0; i < hidden; ++i) acc += row[i] * h2[i];
    out[j] = acc;
    const double diff = acc - target[j];
    loss += diff * diff;
    d_out[j] = 2.0 * diff;
  }

  // Backward.
  std::vector<double> d_h2(hidden, 0.0), d_h1(hidden, 0.0);
  for (int j = 0; j < out_dim; ++j) {
    const double g = d_out[j];
    double* grad_row = &grad[w3() + static_cast<std::size_t>(j) * hidden];
    const double* row = &params_[w3() + static_cast<std::size_t>(j) * hidden];
    for (int i = 0; i < hidden; ++i) {
      grad_row[i] += g * h2[i];
      d_h2[i] += g * row[i];
    }
    grad[b3() + j] += g;
  }
  for (int j = 0; j < hidden; ++j) {
    const double g = d_h2[j] * (1.0 - h2[j] * h2[j]);  // through tanh
    double* grad_row = &grad[w2() + static_cast<std::size_t>(j) * hidden];
    const double* row = &params_[w2() + static_cast<std::size_t>(j) * hidden];
    for (int i = 0; i < hidden; ++i) {
      grad_row[i] += g * h1[i];
      d_h1[i] += g * row[i];
    }
    grad[b2() + j] += g;
  }
  for (int j = 0; j < hidden; ++j) {
    const double g = d_h1[j] * (1.0 - h1[j] * h1[j]);
    double* grad_row = &grad[w1() + static_cast<std::size_t>(j) * in_dim];
    for (int i = 0; i < in_dim; ++i) grad_row[i] += g * input[i];
    grad[b1() + j] += g;
  }
  return loss;
}

std::vector<double> make_regressor_input(const Image& x_next, const Image* x_terminal,
                                         int t_next, int steps, bool conditions_on_terminal) {
  const Image scaled = scale_to_model(x_next);
  std::vector<double> input;
  input.reserve(scaled.size() * (conditions_on_terminal ? 2 : 1) + 1);
  input.insert(input.end(), scaled.pixels.begin(), scaled.pixels.end());
  if (conditions_on_terminal) {
    if (x_terminal == nullptr) {
      throw std::invalid_argument("make_regressor_input: model conditions on x_N");
    }
    require_same_shape(x_next, *x_terminal);
    const Image scaled_terminal = scale_to_model(*x_terminal);
    input.insert(input.end(), scaled_terminal.pixels.begin(), scaled_terminal.pixels.end());
  }
  input.push_back(static_cast<double>(t_next) / static_cast<double>(steps));
  return input;
}

TrainedDenoiser::TrainedDenoiser(ToyRegressor model, Schedule schedule)
    : model_(std::move(model)), schedule_(std::move(schedule)) {
  const bool poisson = schedule_.kind() == NoiseKind::kPoisson;
  if (model_.config().conditions_on_terminal != poisson) {
    throw std::invalid_argument(
        "TrainedDenoiser: model terminal conditioning does not match the schedule family");
  }
}

Image TrainedDenoiser::predict(const Image& x_next, const Image* x_terminal,
                               int t_next) const {
  const RegressorConfig& config = model_.config();
  if (x_next.width != config.width || x_next.height != config.height) {
    throw std::invalid_argument("TrainedDenoiser: image dimensions do not match the model");
  }
  const std::vector<double> input = make_regressor_input(
      x_next, x_terminal, t_next, schedule_.steps(), config.conditions_on_terminal);
  const std::vector<double> out = model_.forward(input);
  Image scaled(config.width, config.height);
  scaled.pixels = out;
  Image f = scale_from_model(scaled);
  if (schedule_.kind() != NoiseKind::kGaussian) {
    f = floor_pixels(f, kEpsilonFloor);
  }
  return f;
}

bool TrainedDenoiser::needs_terminal() const {
  return schedule_.kind() == NoiseKind::kPoisson;
}

namespace {

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw io_error(path + ": truncated checkpoint");
  return value;
}

constexpr char kMagic[4] = {'D', 'F', 'D', 'N'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_checkpoint(const ToyRegressor& model,
                     const std::map<std::string, std::string>& metadata,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path.string() + ": cannot open for writing");

  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kVersion);

  // The model geometry always travels with the caller's metadata.
  std::map<std::string, std::string> full = metadata;
  full["width"] = std::to_string(model.config().width);
  full["height"] = std::to_string(model.config().height);
  full["hidden"] = std::to_string(model.config().hidden);

  std::string meta_text;
  for (const auto& [key, value] : full) {
    meta_text += key;
    meta_text += '=';
    meta_text += value;
    meta_text += '\n';
  }
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(meta_text.size()));
  out.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));

  const RegressorConfig& config = model.config();
  write_pod<std::uint32_t>(out, 4);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(config.input_dim()));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(config.hidden));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(config.hidden));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(config.output_dim()));

  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(model.parameter_count()));
  out.write(reinterpret_cast<const char*>(model.parameters().data()),
            static_cast<std::streamsize>(model.parameter_count() * sizeof(double)));
  if (!out) throw io_error(path.string() + ": write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path.string() + ": cannot open");

  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw io_error(path.string() + ": not a diffden checkpoint");
  }
  const auto version = read_pod<std::uint32_t>(in, path.string());
  if (version != kVersion) {
    throw io_error(path.string() + ": unsupported checkpoint version " +
                   std::to_string(version));
  }

  const auto meta_len = read_pod<std::uint32_t>(in, path.string());
  std::string meta_text(meta_len, '\0');
  in.read(meta_text.data(), meta_len);
  if (!in) throw io_error(path.string() + ": truncated checkpoint metadata");

  std::map<std::string, std::string> metadata;
  std::size_t pos = 0;
  while (pos < meta_text.size()) {
    const std::size_t eol = meta_text.find('\n', pos);
    const std::string line = meta_text.substr(pos, eol - pos);
    pos = (eol == std::string::npos) ? meta_text.size() : eol + 1;
    const std::size_t eq = line.find('=');
    if (eq != std::string::npos) metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }

  const auto n_dims = read_pod<std::uint32_t>(in, path.string());
  if (n_dims != 4) throw io_error(path.string() + ": unexpected layer dimension count");
  std::uint32_t dims[4];
  for (auto& d : dims) d = read_pod<std::uint32_t>(in, path.string());

  RegressorConfig config;
  try {
    config.width = std::stoi(metadata.at("width"));
    config.height = std::stoi(metadata.at("height"));
    config.conditions_on_terminal = metadata.at("family") == "poisson";
  } catch (const std::exception&) {
    throw io_error(path.string() + ": checkpoint metadata missing width/height/family");
  }
  config.hidden = static_cast<int>(dims[1]);
  if (static_cast<std::uint32_t>(config.input_dim()) != dims[0] ||
      static_cast<std::uint32_t>(config.output_dim()) != dims[3] || dims[1] != dims[2]) {
    throw io_error(path.string() + ": layer dimensions inconsistent with metadata");
  }

  ToyRegressor model(config, 0);
  const auto n_params = read_pod<std::uint64_t>(in, path.string());
  if (n_params != model.parameter_count()) {
    throw io_error(path.string() + ": parameter count mismatch");
  }
  in.read(reinterpret_cast<char*>(model.parameters().data()),
          static_cast<std::streamsize>(n_params * sizeof(double)));
  if (!in) throw io_error(path.string() + ": truncated parameter array");

  return Checkpoint{std::move(model), std::move(metadata)};
}

std::map<std::string, std::string> checkpoint_metadata(const Schedule& s, std::uint64_t seed) {
  std::map<std::string, std::string> metadata;
  metadata["family"] = noise_kind_name(s.kind());
  metadata["param"] = format_double(terminal_param(s.family()));  // lossless round trip
  metadata["N"] = std::to_string(s.steps());
  metadata["seed"] = std::to_string(seed);
  return metadata;
}

Schedule schedule_from_metadata(const std::map<std::string, std::string>& metadata) {
  try {
    const NoiseKind k = parse_noise_kind(metadata.at("family"));
    const double param = std::stod(metadata.at("param"));
    const int steps = std::stoi(metadata.at("N"));
    return build_schedule(make_family(k, param), steps);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("checkpoint metadata missing family/param/N");
  }
}

}  // namespace diffden
