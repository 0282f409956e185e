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

#include "diffden/reverse.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "diffden/errors.hpp"
#include "diffden/forward.hpp"
#include "diffden/pgm.hpp"

namespace diffden {

namespace {

const Image* terminal_for(const Denoiser& den, const Image* x_terminal) {
  if (den.needs_terminal()) {
    if (x_terminal == nullptr) {
      throw std::invalid_argument("reverse process: this denoiser requires x_N");
    }
    return x_terminal;
  }
  return nullptr;  // Gaussian/Gamma: x_t is independent of x_N given x_{t+1}
}

}  // namespace

Image reverse_step(const Schedule& s, const Image& x_next, const Image* x_terminal, int t,
                   const Denoiser& den, RngStream& rng) {
  if (t < 1 || t > s.steps() - 1) {
    throw std::out_of_range("reverse_step: t must be in 1..N-1");
  }
  const Image f_hat = den.predict(x_next, terminal_for(den, x_terminal), t + 1);
  return sample_bridge(s, f_hat, x_next, t, rng);
}

Image final_step(const Schedule& s, const Image& x_1, const Image* x_terminal,
                 const Denoiser& den) {
  (void)s;
  return den.predict(x_1, terminal_for(den, x_terminal), 1);
}

std::pair<Image, std::optional<Trajectory>> sample_reverse(const Schedule& s,
                                                           const Image& x_terminal,
                                                           const Denoiser& den, RngStream& rng,
                                                           bool keep_trajectory) {
  std::optional<Trajectory> trajectory;
  if (keep_trajectory) {
    trajectory.emplace();
    trajectory->schedule_fingerprint = s.to_text();
    trajectory->seed = rng.seed();
    trajectory->stream_id = rng.stream_id();
    trajectory->states.emplace_back(s.steps(), x_terminal);
  }

  Image x = x_terminal;
  for (int t = s.steps() - 1; t >= 1; --t) {
    x = reverse_step(s, x, &x_terminal, t, den, rng);
    if (trajectory) trajectory->states.emplace_back(t, x);
  }
  Image x0 = final_step(s, x, &x_terminal, den);
  if (trajectory) trajectory->states.emplace_back(0, x0);
  return {std::move(x0), std::move(trajectory)};
}

Image posterior_mean_estimate(const Schedule& s, const Image& x_terminal, const Denoiser& den,
                              int n_samples, const RngStream& rng) {
  if (n_samples < 1) {
    throw std::invalid_argument("posterior_mean_estimate: n_samples must be >= 1");
  }

  std::vector<Image> outputs(static_cast<std::size_t>(n_samples));
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned workers =
      std::min<unsigned>(hw == 0 ? 1 : hw, static_cast<unsigned>(n_samples));

  auto run_range = [&](int begin, int end) {
    for (int chain = begin; chain < end; ++chain) {
      RngStream chain_rng = rng.fork(static_cast<std::uint64_t>(chain));
      outputs[static_cast<std::size_t>(chain)] =
          sample_reverse(s, x_terminal, den, chain_rng, false).first;
    }
  };

  if (workers <= 1) {
    run_range(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int per = (n_samples + static_cast<int>(workers) - 1) / static_cast<int>(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const int begin = static_cast<int>(w) * per;
      const int end = std::min(n_samples, begin + per);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (std::thread& worker : pool) worker.join();
  }

  Image mean(x_terminal.width, x_terminal.height);
  for (const Image& out : outputs) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean.pixels[i] += out.pixels[i];
  }
  const double inv = 1.0 / static_cast<double>(n_samples);
  for (double& p : mean.pixels) p *= inv;
  return mean;
}

void export_trajectory(const Trajectory& trajectory, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (const auto& [t, image] : trajectory.states) {
    save_pgm(image, directory / ("t_" + std::to_string(t) + ".pgm"));
  }
  std::ofstream meta(directory / "metadata.txt");
  if (!meta) throw io_error((directory / "metadata.txt").string() + ": cannot open");
  meta << trajectory.schedule_fingerprint;
  meta << "seed=" << trajectory.seed << "\n";
  meta << "stream=" << trajectory.stream_id << "\n";
  meta << "frames=" << trajectory.states.size() << "\n";
}

}  // namespace diffden
