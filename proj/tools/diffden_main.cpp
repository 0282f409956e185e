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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "diffden/denoiser.hpp"
#include "diffden/errors.hpp"
#include "diffden/forward.hpp"
#include "diffden/image.hpp"
#include "diffden/metrics.hpp"
#include "diffden/pgm.hpp"
#include "diffden/regressor.hpp"
#include "diffden/reverse.hpp"
#include "diffden/rng.hpp"
#include "diffden/schedule.hpp"
#include "diffden/stat_tests.hpp"
#include "diffden/train.hpp"
#include "diffden/verification.hpp"
#include "diffden/version.hpp"

namespace fs = std::filesystem;
using namespace diffden;

namespace {

// Exit codes: 0 success, 1 domain/contract error, 2 I/O or format error,
// 3 verification failure.
constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerify = 3;

struct CommonOpts {
  std::string family = "gaussian";
  double param = 25.0;
  int steps = 20;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool family_required) {
  auto* family = cmd->add_option("--family", opts.family, "Noise family: gaussian|gamma|poisson");
  auto* param = cmd->add_option("--param", opts.param, "Terminal noise parameter (sigma/alpha/lambda)");
  cmd->add_option("--N", opts.steps, "Number of diffusion steps");
  if (family_required) {
    family->required();
    param->required();
  }
  cmd->add_option("--seed", opts.seed, "RNG seed (no wall-clock seeding)")->required();
  cmd->add_option("--out", opts.out, "Output directory")->required();
}

Schedule schedule_from(const CommonOpts& opts) {
  return build_schedule(make_family(parse_noise_kind(opts.family), opts.param), opts.steps);
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error(out + ": cannot create output directory");
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw io_error(path.string() + ": write failed");
}

std::string csv_meta_line(std::uint64_t seed) {
  return "# version=" + std::string(kVersion) + " seed=" + std::to_string(seed) + "\n";
}

std::vector<fs::path> list_pgms(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw io_error(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// --- corrupt ----------------------------------------------------------------

struct CorruptOpts {
  CommonOpts common;
  std::string input;
  int t = -1;  // default: N
};

int cmd_corrupt(const CorruptOpts& opts) {
  const Schedule s = schedule_from(opts.common);
  const int t = opts.t < 0 ? s.steps() : opts.t;
  if (t < 1 || t > s.steps()) {
    throw std::out_of_range("corrupt: --t must be in 1.." + std::to_string(s.steps()));
  }
  Image clean = load_pgm(opts.input);
  if (s.kind() != NoiseKind::kGaussian) clean = floor_pixels(clean, kEpsilonFloor);

  const fs::path out_dir = ensure_out_dir(opts.common.out);
  const std::string stem = fs::path(opts.input).stem().string();
  const fs::path out_pgm = out_dir / (stem + "_t" + std::to_string(t) + ".pgm");
  if (fs::absolute(out_pgm) == fs::absolute(opts.input)) {
    throw std::invalid_argument("corrupt: output would overwrite the input image");
  }

  RngStream rng(opts.common.seed, 0);
  const Image noisy = sample_marginal(s, clean, t, rng);
  save_pgm(noisy, out_pgm);

  std::string provenance = s.to_text();
  provenance += "t=" + std::to_string(t) + "\n";
  provenance += "seed=" + std::to_string(opts.common.seed) + "\n";
  provenance += "input=" + stem + ".pgm\n";
  write_text(out_dir / (stem + "_t" + std::to_string(t) + ".meta.txt"), provenance);

  std::cout << "wrote " << out_pgm.string() << "\n";
  return kExitOk;
}

// --- train ------------------------------------------------------------------

struct TrainOpts {
  CommonOpts common;
  std::string data_dir;
  int steps = 2000;
  int batch = 16;
  double learning_rate = 1e-3;
  int hidden = 256;
};

int cmd_train(const TrainOpts& opts) {
  const Schedule s = schedule_from(opts.common);
  const std::vector<fs::path> files = list_pgms(opts.data_dir);
  if (files.empty()) throw io_error(opts.data_dir + ": no .pgm files");
  std::vector<Image> dataset;
  dataset.reserve(files.size());
  for (const fs::path& f : files) dataset.push_back(load_pgm(f));
  for (const Image& img : dataset) require_same_shape(dataset.front(), img);

  RegressorConfig config;
  config.width = dataset.front().width;
  config.height = dataset.front().height;
  config.hidden = opts.hidden;
  config.conditions_on_terminal = s.kind() == NoiseKind::kPoisson;
  ToyRegressor model(config, opts.common.seed);

  TrainConfig train_config;
  train_config.steps = opts.steps;
  train_config.batch = opts.batch;
  train_config.learning_rate = opts.learning_rate;
  train_config.seed = opts.common.seed;
  const TrainResult result = train(dataset, s, model, train_config);

  const fs::path out_dir = ensure_out_dir(opts.common.out);
  save_checkpoint(model, checkpoint_metadata(s, opts.common.seed), out_dir / "model.ckpt");

  std::string csv = "step,loss\n";
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
    csv += std::to_string(i) + "," + format_double(result.loss_trace[i]) + "\n";
  }
  csv += csv_meta_line(opts.common.seed);
  write_text(out_dir / "loss.csv", csv);

  std::cout << "wrote " << (out_dir / "model.ckpt").string() << " ("
            << result.loss_trace.size() << " steps)\n";
  return kExitOk;
}

// --- sample -----------------------------------------------------------------

struct SampleOpts {
  CommonOpts common;
  std::string input;
  std::string model_path;
  std::string prior_dir;
  bool use_oracle = false;
  bool family_given = false;  // only then is --family checked against checkpoints
  int n_samples = 100;
  bool write_mean = false;
  bool write_trajectory = false;
};

int cmd_sample(const SampleOpts& opts) {
  const Image noisy = load_pgm(opts.input);

  // Assemble the denoiser and its schedule.
  std::unique_ptr<Denoiser> denoiser;
  std::unique_ptr<Schedule> schedule;
  if (opts.use_oracle) {
    if (opts.prior_dir.empty()) {
      throw std::invalid_argument("sample: --oracle requires --prior <dir of clean PGMs>");
    }
    schedule = std::make_unique<Schedule>(schedule_from(opts.common));
    const std::vector<fs::path> files = list_pgms(opts.prior_dir);
    if (files.empty()) throw io_error(opts.prior_dir + ": no .pgm files");
    std::vector<Image> atoms;
    for (const fs::path& f : files) {
      Image atom = load_pgm(f);
      if (schedule->kind() != NoiseKind::kGaussian) atom = floor_pixels(atom, kEpsilonFloor);
      atoms.push_back(std::move(atom));
    }
    FinitePrior prior(std::move(atoms), std::vector<double>(files.size(), 1.0));
    denoiser = std::make_unique<OracleDenoiser>(std::move(prior), *schedule);
  } else {
    if (opts.model_path.empty()) {
      throw std::invalid_argument("sample: provide --model <checkpoint> or --oracle");
    }
    Checkpoint checkpoint = load_checkpoint(opts.model_path);
    schedule = std::make_unique<Schedule>(schedule_from_metadata(checkpoint.metadata));
    // Flags, when given, must agree with the checkpoint.
    if (opts.family_given &&
        parse_noise_kind(opts.common.family) != schedule->kind()) {
      throw std::invalid_argument("sample: --family does not match the checkpoint (" +
                                  noise_kind_name(schedule->kind()) + ")");
    }
    denoiser = std::make_unique<TrainedDenoiser>(std::move(checkpoint.model), *schedule);
  }

  const fs::path out_dir = ensure_out_dir(opts.common.out);
  const RngStream base(opts.common.seed, 0);

  // Chains run in parallel on forked streams; outputs land in fixed slots so
  // the result is identical to a sequential run.
  std::vector<Image> samples(static_cast<std::size_t>(opts.n_samples));
  std::optional<Trajectory> trajectory;
  const auto run_range = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      RngStream chain = base.fork(static_cast<std::uint64_t>(i));
      const bool keep = opts.write_trajectory && i == 0;
      auto [x0_hat, traj] = sample_reverse(*schedule, noisy, *denoiser, chain, keep);
      samples[static_cast<std::size_t>(i)] = std::move(x0_hat);
      if (keep && traj) trajectory = std::move(traj);  // only the chain-0 worker writes
    }
  };
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned workers =
      std::min<unsigned>(hw == 0 ? 1 : hw, static_cast<unsigned>(opts.n_samples));
  if (workers <= 1) {
    run_range(0, opts.n_samples);
  } else {
    std::vector<std::thread> pool;
    const int per =
        (opts.n_samples + static_cast<int>(workers) - 1) / static_cast<int>(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const int begin = static_cast<int>(w) * per;
      const int end = std::min(opts.n_samples, begin + per);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (std::thread& worker : pool) worker.join();
  }

  if (trajectory) export_trajectory(*trajectory, out_dir / "trajectory");
  for (int i = 0; i < opts.n_samples; ++i) {
    save_pgm(samples[static_cast<std::size_t>(i)],
             out_dir / ("sample_" + std::to_string(i) + ".pgm"));
  }
  if (opts.write_mean) {
    Image mean(noisy.width, noisy.height);
    for (const Image& sample : samples) {
      for (std::size_t i = 0; i < mean.size(); ++i) mean.pixels[i] += sample.pixels[i];
    }
    for (double& p : mean.pixels) p /= static_cast<double>(opts.n_samples);
    save_pgm(mean, out_dir / "mean.pgm");
  }

  std::string provenance = schedule->to_text();
  provenance += "seed=" + std::to_string(opts.common.seed) + "\n";
  provenance += "n=" + std::to_string(opts.n_samples) + "\n";
  provenance += "denoiser=" + std::string(opts.use_oracle ? "oracle" : "model") + "\n";
  write_text(out_dir / "sample.meta.txt", provenance);

  std::cout << "wrote " << opts.n_samples << " sample(s) to " << out_dir.string() << "\n";
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateOpts {
  std::string gt_dir;
  std::string cand_dir;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_evaluate(const EvaluateOpts& opts) {
  const std::vector<fs::path> gt_files = list_pgms(opts.gt_dir);
  const std::vector<fs::path> cand_files = list_pgms(opts.cand_dir);

  std::set<std::string> gt_names;
  std::set<std::string> cand_names;
  for (const auto& f : gt_files) gt_names.insert(f.filename().string());
  for (const auto& f : cand_files) cand_names.insert(f.filename().string());
  if (gt_names != cand_names) {
    std::string offenders;
    for (const auto& name : gt_names) {
      if (!cand_names.count(name)) offenders += " missing-candidate:" + name;
    }
    for (const auto& name : cand_names) {
      if (!gt_names.count(name)) offenders += " missing-ground-truth:" + name;
    }
    throw std::invalid_argument("evaluate: unmatched filenames:" + offenders);
  }
  if (gt_names.empty()) throw std::invalid_argument("evaluate: no image pairs found");

  std::string csv = "name,psnr_db,ssim\n";
  double psnr_sum = 0.0;
  long long psnr_finite = 0;
  double ssim_sum = 0.0;
  for (const auto& name : gt_names) {  // std::set iterates lexicographically
    const Image gt = load_pgm(fs::path(opts.gt_dir) / name);
    const Image cand = load_pgm(fs::path(opts.cand_dir) / name);
    const MetricPair pair = compute_metrics(gt, cand);
    csv += name + "," + format_double(pair.psnr_db) + "," + format_double(pair.ssim) + "\n";
    if (std::isfinite(pair.psnr_db)) {
      psnr_sum += pair.psnr_db;
      ++psnr_finite;
    }
    ssim_sum += pair.ssim;
  }
  const double psnr_mean = psnr_finite > 0
                               ? psnr_sum / static_cast<double>(psnr_finite)
                               : std::numeric_limits<double>::infinity();
  const double ssim_mean = ssim_sum / static_cast<double>(gt_names.size());
  csv += "aggregate," + format_double(psnr_mean) + "," + format_double(ssim_mean) + "\n";
  csv += csv_meta_line(opts.seed);

  const fs::path out_dir = ensure_out_dir(opts.out);
  write_text(out_dir / "metrics.csv", csv);
  std::cout << "wrote " << (out_dir / "metrics.csv").string() << "\n";
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

struct VerifyOpts {
  std::string out;
  std::uint64_t seed = 0x5eedULL;
  double significance = 0.01;
  bool inject_fault = false;
};

int cmd_verify(const VerifyOpts& opts) {
  VerifyConfig config;
  config.seed = opts.seed;
  config.significance = opts.significance;
  config.inject_fault = opts.inject_fault;
  const SuiteResult result = run_verification_suite(config);

  const fs::path out_dir = ensure_out_dir(opts.out);
  std::ofstream csv(out_dir / "report.csv", std::ios::binary);
  if (!csv) throw io_error((out_dir / "report.csv").string() + ": cannot open");
  write_suite_csv(result, csv, opts.seed, kVersion);

  int passed = 0;
  for (const SuiteRow& row : result.rows) {
    if (row.report.pass) ++passed;
  }
  std::cout << passed << "/" << result.rows.size() << " checks passed; report at "
            << (out_dir / "report.csv").string() << "\n";
  if (!result.all_pass) {
    for (const SuiteRow& row : result.rows) {
      if (!row.report.pass) {
        std::cout << "FAIL " << row.suite << "/" << row.name << "\n";
      }
    }
  }
  return result.all_pass ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise-model-adapted diffusion processes for generative image denoising"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Optional key=value config file supplying flag defaults");
  app.require_subcommand(1);

  std::function<int()> run;

  CorruptOpts corrupt_opts;
  CLI::App* corrupt = app.add_subcommand("corrupt", "Apply forward corruption q(x_t | x_0)");
  add_common(corrupt, corrupt_opts.common, true);
  corrupt->add_option("--in", corrupt_opts.input, "Clean input PGM")->required();
  corrupt->add_option("--t", corrupt_opts.t, "Diffusion time (default N)");
  corrupt->callback([&] { run = [&] { return cmd_corrupt(corrupt_opts); }; });

  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the toy denoising regressor");
  add_common(train_cmd, train_opts.common, true);
  train_cmd->add_option("--data", train_opts.data_dir, "Directory of clean training PGMs")
      ->required();
  train_cmd->add_option("--steps", train_opts.steps, "SGD steps");
  train_cmd->add_option("--batch", train_opts.batch, "Batch size");
  train_cmd->add_option("--lr", train_opts.learning_rate, "Learning rate");
  train_cmd->add_option("--hidden", train_opts.hidden, "Hidden layer width");
  train_cmd->callback([&] { run = [&] { return cmd_train(train_opts); }; });

  SampleOpts sample_opts;
  CLI::App* sample = app.add_subcommand("sample", "Run the reverse process from a noisy image");
  add_common(sample, sample_opts.common, false);
  sample->add_option("--in", sample_opts.input, "Noisy input PGM")->required();
  sample->add_option("--model", sample_opts.model_path, "Trained checkpoint");
  sample->add_flag("--oracle", sample_opts.use_oracle, "Use the exact finite-prior oracle");
  sample->add_option("--prior", sample_opts.prior_dir, "Directory of prior atom PGMs");
  sample->add_option("--n", sample_opts.n_samples, "Number of posterior samples");
  sample->add_flag("--mean", sample_opts.write_mean, "Also write the mean of samples");
  sample->add_flag("--trajectory", sample_opts.write_trajectory,
                   "Export the first chain's trajectory frames");
  sample->callback([&, sample] {
    sample_opts.family_given = sample->count("--family") > 0;
    run = [&] { return cmd_sample(sample_opts); };
  });

  EvaluateOpts evaluate_opts;
  CLI::App* evaluate = app.add_subcommand("evaluate", "PSNR/SSIM against ground truth");
  evaluate->add_option("--gt", evaluate_opts.gt_dir, "Ground-truth directory")->required();
  evaluate->add_option("--cand", evaluate_opts.cand_dir, "Candidate directory")->required();
  evaluate->add_option("--out", evaluate_opts.out, "Output directory")->required();
  evaluate->add_option("--seed", evaluate_opts.seed, "Seed echoed into the CSV metadata");
  evaluate->callback([&] { run = [&] { return cmd_evaluate(evaluate_opts); }; });

  VerifyOpts verify_opts;
  CLI::App* verify = app.add_subcommand("verify", "Run the statistical verification suite");
  verify->add_option("--out", verify_opts.out, "Output directory")->required();
  verify->add_option("--seed", verify_opts.seed, "Suite seed");
  verify->add_option("--significance", verify_opts.significance, "Per-test significance");
  verify->add_flag("--inject-fault", verify_opts.inject_fault,
                   "Corrupt one identity input to demonstrate failure detection");
  verify->callback([&] { run = [&] { return cmd_verify(verify_opts); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return run();
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
