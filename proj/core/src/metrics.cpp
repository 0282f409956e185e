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

#include "diffden/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace diffden {

double psnr(const Image& a, const Image& b) {
  require_same_shape(a, b);
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.pixels[i] - b.pixels[i];
    sq += d * d;
  }
  const double mse = sq / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(kPixelMax * kPixelMax / mse);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::array<double, kSsimWindow> ssim_kernel() {
  std::array<double, kSsimWindow> k{};
  const int half = kSsimWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = static_cast<double>(i - half);
    k[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian filter, valid mode: output is (w-10) x (h-10).
std::vector<double> gaussian_filter_valid(const std::vector<double>& in, int w, int h) {
  const auto kernel = ssim_kernel();
  const int out_w = w - kSsimWindow + 1;
  const int out_h = h - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(out_w) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        acc += kernel[k] * in[static_cast<std::size_t>(y) * w + x + k];
      }
      rows[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h, 0.0);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        acc += kernel[k] * rows[static_cast<std::size_t>(y + k) * out_w + x];
      }
      out[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b);
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  }
  const double c1 = (0.01 * kPixelMax) * (0.01 * kPixelMax);
  const double c2 = (0.03 * kPixelMax) * (0.03 * kPixelMax);

  const std::size_t n = a.size();
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = a.pixels[i] * a.pixels[i];
    bb[i] = b.pixels[i] * b.pixels[i];
    ab[i] = a.pixels[i] * b.pixels[i];
  }
  const auto mu_a = gaussian_filter_valid(a.pixels, a.width, a.height);
  const auto mu_b = gaussian_filter_valid(b.pixels, a.width, a.height);
  const auto m_aa = gaussian_filter_valid(aa, a.width, a.height);
  const auto m_bb = gaussian_filter_valid(bb, a.width, a.height);
  const auto m_ab = gaussian_filter_valid(ab, a.width, a.height);

  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = m_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = m_bb[i] - mu_b[i] * mu_b[i];
    const double cov = m_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
    acc += num / den;
  }
  return acc / static_cast<double>(mu_a.size());
}

MetricPair compute_metrics(const Image& reference, const Image& candidate) {
  return MetricPair{psnr(reference, candidate), ssim(reference, candidate)};
}

GaussianBridgeKl kl_gaussian_bridge(const GaussianBridgeParams& q,
                                    const GaussianBridgeParams& p) {
  require_same_shape(q.mu, p.mu);
  if (q.sigma != p.sigma) {
    throw std::invalid_argument("kl_gaussian_bridge: bridge laws must share sigma");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < q.mu.size(); ++i) {
    const double d = q.mu.pixels[i] - p.mu.pixels[i];
    sq += d * d;
  }
  GaussianBridgeKl kl;
  kl.simplified = sq;
  if (sq == 0.0) {
    kl.exact = 0.0;
  } else if (q.sigma == 0.0) {
    kl.exact = std::numeric_limits<double>::infinity();
  } else {
    kl.exact = sq / (2.0 * q.sigma * q.sigma);
  }
  return kl;
}

double kl_gamma_scalar(double x0, double f, double param_diff) {
  if (!(x0 > 0.0) || !(f > 0.0)) {
    throw std::domain_error("kl_gamma: pixels must be positive");
  }
  return param_diff * (std::log(f / x0) + x0 / f - 1.0);
}

double kl_poisson_scalar(double x0, double f, double param_diff) {
  if (!(x0 > 0.0) || !(f > 0.0)) {
    throw std::domain_error("kl_poisson: pixels must be positive");
  }
  return (std::log(x0) - std::log(f)) * param_diff * x0 - param_diff * (x0 - f);
}

double kl_gamma(const Image& x0, const Image& f, double alpha_t, double alpha_next) {
  require_same_shape(x0, f);
  if (!(alpha_t > alpha_next)) {
    throw std::invalid_argument("kl_gamma: needs alpha_t > alpha_next");
  }
  const double diff = alpha_t - alpha_next;
  double acc = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    acc += kl_gamma_scalar(x0.pixels[i], f.pixels[i], diff);
  }
  return acc;
}

double kl_poisson(const Image& x0, const Image& f, double lambda_t, double lambda_next) {
  require_same_shape(x0, f);
  if (!(lambda_t > lambda_next)) {
    throw std::invalid_argument("kl_poisson: needs lambda_t > lambda_next");
  }
  const double diff = lambda_t - lambda_next;
  double acc = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    acc += kl_poisson_scalar(x0.pixels[i], f.pixels[i], diff);
  }
  return acc;
}

}  // namespace diffden
