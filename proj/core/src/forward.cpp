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

#include "diffden/forward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "diffden/distributions.hpp"

namespace diffden {

namespace {

void require_time_in(int t, int lo, int hi, const char* where) {
  if (t < lo || t > hi) {
    throw std::out_of_range(std::string(where) + ": t=" + std::to_string(t) + " outside " +
                            std::to_string(lo) + ".." + std::to_string(hi));
  }
}

}  // namespace

Image sample_marginal(const Schedule& s, const Image& x0, int t, RngStream& rng) {
  require_time_in(t, 1, s.steps(), "sample_marginal");
  const double p = s.param(t);
  Image out(x0.width, x0.height);
  switch (s.kind()) {
    case NoiseKind::kGaussian:
      for (std::size_t i = 0; i < x0.size(); ++i) {
        out.pixels[i] = x0.pixels[i] + p * sample_gaussian(0.0, 1.0, rng);
      }
      break;
    case NoiseKind::kGamma:
      for (std::size_t i = 0; i < x0.size(); ++i) {
        out.pixels[i] = x0.pixels[i] * sample_gamma(p, rng) / p;
      }
      break;
    case NoiseKind::kPoisson:
      for (std::size_t i = 0; i < x0.size(); ++i) {
        out.pixels[i] = static_cast<double>(sample_poisson(p * x0.pixels[i], rng)) / p;
      }
      break;
  }
  return out;
}

Image sample_step(const Schedule& s, const Image& x_t, int t, RngStream& rng) {
  require_time_in(t, 0, s.steps() - 1, "sample_step");
  Image out(x_t.width, x_t.height);
  switch (s.kind()) {
    case NoiseKind::kGaussian: {
      const double s_t = s.sigma(t);
      const double s_next = s.sigma(t + 1);
      const double step_std = std::sqrt(s_next * s_next - s_t * s_t);
      for (std::size_t i = 0; i < x_t.size(); ++i) {
        out.pixels[i] = x_t.pixels[i] + step_std * sample_gaussian(0.0, 1.0, rng);
      }
      return out;
    }
    case NoiseKind::kGamma: {
      if (t == 0) {
        const double a1 = s.param(1);
        for (std::size_t i = 0; i < x_t.size(); ++i) {
          out.pixels[i] = x_t.pixels[i] * sample_gamma(a1, rng) / a1;
        }
      } else {
        const double a_t = s.param(t);
        const double a_next = s.param(t + 1);
        const double ratio = a_t / a_next;
        for (std::size_t i = 0; i < x_t.size(); ++i) {
          out.pixels[i] = ratio * sample_beta(a_next, a_t - a_next, rng) * x_t.pixels[i];
        }
      }
      return out;
    }
    case NoiseKind::kPoisson:
      throw std::invalid_argument(
          "sample_step: the Poisson chain is oriented from x_N downward; use sample_bridge");
  }
  return out;
}

GaussianBridgeParams bridge_params_gaussian(const Schedule& s, const Image& x0,
                                            const Image& x_next, int t) {
  if (s.kind() != NoiseKind::kGaussian) {
    throw std::invalid_argument("bridge_params_gaussian: schedule family is not Gaussian");
  }
  require_same_shape(x0, x_next);
  require_time_in(t, 0, s.steps() - 1, "bridge_params_gaussian");

  GaussianBridgeParams params;
  params.mu = Image(x0.width, x0.height);
  if (t == 0) {
    params.mu = x0;
    params.sigma = 0.0;
    return params;
  }
  const double s_t = s.sigma(t);
  const double s_next = s.sigma(t + 1);
  const double var_t = s_t * s_t;
  const double var_next = s_next * s_next;
  const double w_next = var_t / var_next;
  const double w_clean = (var_next - var_t) / var_next;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    params.mu.pixels[i] = w_next * x_next.pixels[i] + w_clean * x0.pixels[i];
  }
  params.sigma = (s_t / s_next) * std::sqrt(var_next - var_t);
  return params;
}

Image sample_bridge(const Schedule& s, const Image& x0, const Image& x_next, int t,
                    RngStream& rng) {
  require_same_shape(x0, x_next);
  require_time_in(t, 0, s.steps() - 1, "sample_bridge");
  if (t == 0) return x0;

  Image out(x0.width, x0.height);
  switch (s.kind()) {
    case NoiseKind::kGaussian: {
      const GaussianBridgeParams params = bridge_params_gaussian(s, x0, x_next, t);
      for (std::size_t i = 0; i < out.size(); ++i) {
        out.pixels[i] = sample_gaussian(params.mu.pixels[i], params.sigma, rng);
      }
      return out;
    }
    case NoiseKind::kGamma: {
      const double a_t = s.param(t);
      const double a_next = s.param(t + 1);
      const double diff = a_t - a_next;
      for (std::size_t i = 0; i < out.size(); ++i) {
        out.pixels[i] =
            (x0.pixels[i] * sample_gamma(diff, rng) + a_next * x_next.pixels[i]) / a_t;
      }
      return out;
    }
    case NoiseKind::kPoisson: {
      const double l_t = s.param(t);
      const double l_next = s.param(t + 1);
      const double diff = l_t - l_next;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double increment =
            static_cast<double>(sample_poisson(diff * x0.pixels[i], rng));
        out.pixels[i] = (l_next * x_next.pixels[i] + increment) / l_t;
      }
      return out;
    }
  }
  return out;
}

long long poisson_count(double value, double lambda) {
  const double product = value * lambda;
  const double rounded = std::round(product);
  const double tol = 1e-6 * std::max(1.0, std::fabs(product));
  if (std::fabs(product - rounded) > tol || rounded < 0.0) {
    throw std::domain_error("poisson_count: value " + std::to_string(value) +
                            " is not on the 1/" + std::to_string(lambda) + " count grid");
  }
  return static_cast<long long>(rounded);
}

}  // namespace diffden
