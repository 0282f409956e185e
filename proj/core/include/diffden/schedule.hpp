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

#ifndef DIFFDEN_SCHEDULE_HPP_
#define DIFFDEN_SCHEDULE_HPP_

#include <string>
#include <variant>
#include <vector>

namespace diffden {

// The three supported corruption models. The parameter is the terminal noise
// level: x_N = x_0 + sigma*z, x_N = (eta/alpha)*x_0 with eta~G(alpha,1), or
// x_N = Poisson(lambda*x_0)/lambda.
struct GaussianNoise {
  double sigma;  // > 0
};
struct GammaNoise {
  double alpha;  // > 1
};
struct PoissonNoise {
  double lambda;  // > 0
};

using NoiseFamily = std::variant<GaussianNoise, GammaNoise, PoissonNoise>;

enum class NoiseKind { kGaussian, kGamma, kPoisson };

NoiseKind kind(const NoiseFamily& family);
double terminal_param(const NoiseFamily& family);

// Throws std::invalid_argument when the parameter is outside its domain
// (sigma <= 0, alpha <= 1, lambda <= 0) or not finite.
void validate(const NoiseFamily& family);

NoiseFamily make_family(NoiseKind k, double param);

// "gaussian" | "gamma" | "poisson" (and back).
NoiseKind parse_noise_kind(const std::string& name);
std::string noise_kind_name(NoiseKind k);

// True iff the parameter sequence satisfies the family's monotonicity
// invariants (Gaussian strictly increasing positive; Gamma strictly
// decreasing, all > 1; Poisson strictly decreasing, all > 0) and ends at the
// family's terminal parameter. Exposed separately from the Schedule
// constructor so the verification suite can exercise it on corrupted inputs.
bool schedule_params_valid(const NoiseFamily& family, const std::vector<double>& params);

// A noise family plus its per-step parameter sequence indexed t = 1..N.
// t = 0 is the implicit noise-free endpoint (sigma_0 = 0, alpha_0 = inf,
// lambda_0 = inf) and is never stored or evaluated.
class Schedule {
 public:
  // Validates the family and the sequence invariants; throws
  // std::invalid_argument on violation or when steps < 2.
  Schedule(NoiseFamily family, std::vector<double> params);

  const NoiseFamily& family() const { return family_; }
  NoiseKind kind() const { return diffden::kind(family_); }
  int steps() const { return static_cast<int>(params_.size()); }  // N

  // Parameter at time t, t in 1..N. Throws std::out_of_range otherwise.
  double param(int t) const;

  // Gaussian only: sigma_t with the t = 0 endpoint handled (sigma_0 = 0).
  double sigma(int t) const;

  // Standard deviation of x_t | x_0 at one pixel of value x0, t in 1..N.
  double conditional_std(int t, double x0) const;

  // key=value provenance block: family, terminal parameter, N.
  std::string to_text() const;

 private:
  NoiseFamily family_;
  std::vector<double> params_;
};

// Linear-std construction: params are the unique sequence for which the
// conditional std of x_t | x_0 grows linearly, std(x_t|x_0) = (t/N) *
// std(x_N|x_0). Closed forms: sigma_t = sigma*t/N, alpha_t = alpha*(N/t)^2,
// lambda_t = lambda*(N/t)^2.
Schedule build_schedule(const NoiseFamily& family, int steps);

}  // namespace diffden

#endif  // DIFFDEN_SCHEDULE_HPP_
