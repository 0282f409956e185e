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

#ifndef DIFFDEN_METRICS_HPP_
#define DIFFDEN_METRICS_HPP_

#include "diffden/forward.hpp"
#include "diffden/image.hpp"

namespace diffden {

struct MetricPair {
  double psnr_db = 0.0;  // +inf sentinel when MSE == 0
  double ssim = 0.0;
};

// 10*log10(255^2 / MSE) over the canonical [0,255] domain.
double psnr(const Image& a, const Image& b);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// L=255, valid-mode (window fully inside the image). Throws
// std::invalid_argument when either dimension is below the window size.
double ssim(const Image& a, const Image& b);

MetricPair compute_metrics(const Image& reference, const Image& candidate);

// KL divergence between two Gaussian bridge laws with equal covariance.
// The exact divergence is ||mu_q - mu_p||^2 / (2 sigma^2); the training
// derivation drops the constant factor, so both are exposed.
struct GaussianBridgeKl {
  double exact = 0.0;
  double simplified = 0.0;  // plain ||mu_q - mu_p||^2
};
GaussianBridgeKl kl_gaussian_bridge(const GaussianBridgeParams& q,
                                    const GaussianBridgeParams& p);

// Per-pixel KL of the Gamma bridge laws, summed over pixels:
//   sum_i (a_t - a_{t+1}) (log(f_i/x0_i) + x0_i/f_i - 1).
double kl_gamma(const Image& x0, const Image& f, double alpha_t, double alpha_next);

// Per-pixel KL of the Poisson bridge laws, summed over pixels:
//   sum_i (log x0_i - log f_i)(l_t - l_{t+1}) x0_i - (l_t - l_{t+1})(x0_i - f_i).
double kl_poisson(const Image& x0, const Image& f, double lambda_t, double lambda_next);

// Scalar single-pixel versions (param_diff = a_t - a_{t+1} or l_t - l_{t+1}).
double kl_gamma_scalar(double x0, double f, double param_diff);
double kl_poisson_scalar(double x0, double f, double param_diff);

}  // namespace diffden

#endif  // DIFFDEN_METRICS_HPP_
