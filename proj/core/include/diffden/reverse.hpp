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

#ifndef DIFFDEN_REVERSE_HPP_
#define DIFFDEN_REVERSE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diffden/denoiser.hpp"
#include "diffden/image.hpp"
#include "diffden/rng.hpp"
#include "diffden/schedule.hpp"

namespace diffden {

// Ordered record of one reverse run: states (t, x_t) from t = N down to 0.
struct Trajectory {
  std::vector<std::pair<int, Image>> states;
  std::string schedule_fingerprint;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// One learned reverse transition x_{t+1} -> x_t, t in 1..N-1: query the
// denoiser at t+1, then draw from the bridge with x_0 replaced by the
// estimate. x_terminal is forwarded to the denoiser only when it asks for it
// (Poisson); Gaussian/Gamma chains never read it past initialization.
Image reverse_step(const Schedule& s, const Image& x_next, const Image* x_terminal, int t,
                   const Denoiser& den, RngStream& rng);

// The final transition x_1 -> x_0: the posterior-mean estimate itself,
// deterministic, no noise injected.
Image final_step(const Schedule& s, const Image& x_1, const Image* x_terminal,
                 const Denoiser& den);

// Full reverse chain from the noisy terminal image: reverse_step for
// t = N-1, ..., 1, then final_step. Returns the x_0 estimate in the
// canonical domain (unclamped; clamping happens only at PGM save).
std::pair<Image, std::optional<Trajectory>> sample_reverse(const Schedule& s,
                                                           const Image& x_terminal,
                                                           const Denoiser& den, RngStream& rng,
                                                           bool keep_trajectory = false);

// Pixelwise average of n_samples independent chains, run on streams
// rng.fork(0), ..., rng.fork(n_samples-1) so the estimate is reproducible
// regardless of scheduling. The "Mean of Samples" posterior-mean estimator.
Image posterior_mean_estimate(const Schedule& s, const Image& x_terminal, const Denoiser& den,
                              int n_samples, const RngStream& rng);

// Writes frames t_<index>.pgm plus metadata.txt into directory.
void export_trajectory(const Trajectory& trajectory, const std::filesystem::path& directory);

}  // namespace diffden

#endif  // DIFFDEN_REVERSE_HPP_
