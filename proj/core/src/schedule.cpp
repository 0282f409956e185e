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

#include "diffden/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "diffden/format.hpp"

namespace diffden {

NoiseKind kind(const NoiseFamily& family) {
  return std::visit(
      [](const auto& f) -> NoiseKind {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          return NoiseKind::kGaussian;
        } else if constexpr (std::is_same_v<T, GammaNoise>) {
          return NoiseKind::kGamma;
        } else {
          return NoiseKind::kPoisson;
        }
      },
      family);
}

double terminal_param(const NoiseFamily& family) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          return f.sigma;
        } else if constexpr (std::is_same_v<T, GammaNoise>) {
          return f.alpha;
        } else {
          return f.lambda;
        }
      },
      family);
}

void validate(const NoiseFamily& family) {
  const double p = terminal_param(family);
  if (!std::isfinite(p)) throw std::invalid_argument("noise parameter must be finite");
  switch (kind(family)) {
    case NoiseKind::kGaussian:
      if (p <= 0.0) throw std::invalid_argument("Gaussian sigma must be > 0");
      break;
    case NoiseKind::kGamma:
      if (p <= 1.0) throw std::invalid_argument("Gamma alpha must be > 1");
      break;
    case NoiseKind::kPoisson:
      if (p <= 0.0) throw std::invalid_argument("Poisson lambda must be > 0");
      break;
  }
}

NoiseFamily make_family(NoiseKind k, double param) {
  NoiseFamily family;
  switch (k) {
    case NoiseKind::kGaussian:
      family = GaussianNoise{param};
      break;
    case NoiseKind::kGamma:
      family = GammaNoise{param};
      break;
    case NoiseKind::kPoisson:
      family = PoissonNoise{param};
      break;
  }
  validate(family);
  return family;
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "gamma") return NoiseKind::kGamma;
  if (name == "poisson") return NoiseKind::kPoisson;
  throw std::invalid_argument("unknown noise family '" + name +
                              "' (expected gaussian|gamma|poisson)");
}

std::string noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kGamma: return "gamma";
    case NoiseKind::kPoisson: return "poisson";
  }
  return "?";
}

bool schedule_params_valid(const NoiseFamily& family, const std::vector<double>& params) {
  if (params.size() < 2) return false;
  for (double p : params) {
    if (!std::isfinite(p)) return false;
  }
  const double terminal = terminal_param(family);
  if (params.back() != terminal) return false;
  switch (kind(family)) {
    case NoiseKind::kGaussian:
      if (params.front() <= 0.0) return false;
      for (std::size_t i = 1; i < params.size(); ++i) {
        if (params[i] <= params[i - 1]) return false;
      }
      return true;
    case NoiseKind::kGamma:
      for (double p : params) {
        if (p <= 1.0) return false;
      }
      for (std::size_t i = 1; i < params.size(); ++i) {
        if (params[i] >= params[i - 1]) return false;
      }
      return true;
    case NoiseKind::kPoisson:
      for (double p : params) {
        if (p <= 0.0) return false;
      }
      for (std::size_t i = 1; i < params.size(); ++i) {
        if (params[i] >= params[i - 1]) return false;
      }
      return true;
  }
  return false;
}

Schedule::Schedule(NoiseFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
  validate(family_);
  if (params_.size() < 2) {
    throw std::invalid_argument("schedule needs at least 2 steps, got " +
                                std::to_string(params_.size()));
  }
  if (!schedule_params_valid(family_, params_)) {
    throw std::invalid_argument("schedule parameter sequence violates " +
                                noise_kind_name(kind()) + " monotonicity invariants");
  }
}

double Schedule::param(int t) const {
  if (t < 1 || t > steps()) {
    throw std::out_of_range("schedule parameter index t=" + std::to_string(t) +
                            " outside 1.." + std::to_string(steps()));
  }
  return params_[static_cast<std::size_t>(t) - 1];
}

double Schedule::sigma(int t) const {
  if (kind() != NoiseKind::kGaussian) {
    throw std::invalid_argument("sigma(t) is only defined for Gaussian schedules");
  }
  if (t == 0) return 0.0;
  return param(t);
}

double Schedule::conditional_std(int t, double x0) const {
  const double p = param(t);
  switch (kind()) {
    case NoiseKind::kGaussian: return p;
    case NoiseKind::kGamma: return x0 / std::sqrt(p);
    case NoiseKind::kPoisson: return std::sqrt(x0 / p);
  }
  return 0.0;
}

std::string Schedule::to_text() const {
  std::ostringstream out;
  out << "family=" << noise_kind_name(kind()) << "\n";
  out << "param=" << format_double(terminal_param(family_)) << "\n";
  out << "N=" << steps() << "\n";
  return out.str();
}

Schedule build_schedule(const NoiseFamily& family, int steps) {
  validate(family);
  if (steps < 2) {
    throw std::invalid_argument("schedule needs N >= 2, got " + std::to_string(steps));
  }
  const double terminal = terminal_param(family);
  const double n = static_cast<double>(steps);
  std::vector<double> params(static_cast<std::size_t>(steps));
  for (int t = 1; t <= steps; ++t) {
    const double ratio = static_cast<double>(t) / n;
    switch (kind(family)) {
      case NoiseKind::kGaussian:
        params[t - 1] = terminal * ratio;
        break;
      case NoiseKind::kGamma:
      case NoiseKind::kPoisson:
        params[t - 1] = terminal / (ratio * ratio);
        break;
    }
  }
  // Pin the endpoint exactly; t/N rounding may perturb the last entry.
  params.back() = terminal;
  return Schedule(family, std::move(params));
}

}  // namespace diffden
