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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "diffden/image.hpp"
#include "diffden/pgm.hpp"
#include "diffden/regressor.hpp"
#include "diffden/rng.hpp"
#include "test_support.hpp"

using namespace diffden;
using diffden::testing::TempDir;
using diffden::testing::random_image;

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string command =
      std::string(DIFFDEN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool same_bytes(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

}  // namespace

TEST_CASE("cli: corrupt writes image plus provenance, byte-identical on rerun") {
  TempDir dir("cli_corrupt");
  RngStream rng(1, 0);
  save_pgm(random_image(12, 10, rng), dir.path() / "clean.pgm");

  const std::string common = " --in " + (dir.path() / "clean.pgm").string() +
                             " --family gaussian --param 25 --N 20 --t 20 --seed 5 --out ";
  CHECK(run_cli("corrupt" + common + (dir.path() / "a").string()) == 0);
  CHECK(run_cli("corrupt" + common + (dir.path() / "b").string()) == 0);

  CHECK(fs::exists(dir.path() / "a" / "clean_t20.pgm"));
  CHECK(fs::exists(dir.path() / "a" / "clean_t20.meta.txt"));
  CHECK(same_bytes(dir.path() / "a" / "clean_t20.pgm", dir.path() / "b" / "clean_t20.pgm"));

  const std::string meta = slurp(dir.path() / "a" / "clean_t20.meta.txt");
  CHECK(meta.find("family=gaussian") != std::string::npos);
  CHECK(meta.find("t=20") != std::string::npos);
  CHECK(meta.find("seed=5") != std::string::npos);
}

TEST_CASE("cli: corrupt rejects out-of-range t with a domain exit code") {
  TempDir dir("cli_corrupt_range");
  RngStream rng(2, 0);
  save_pgm(random_image(8, 8, rng), dir.path() / "clean.pgm");
  const int code = run_cli("corrupt --in " + (dir.path() / "clean.pgm").string() +
                           " --family gaussian --param 25 --N 20 --t 21 --seed 1 --out " +
                           (dir.path() / "out").string());
  CHECK(code == 1);
}

TEST_CASE("cli: corrupt surfaces missing input as an I/O error") {
  TempDir dir("cli_corrupt_io");
  const int code = run_cli("corrupt --in " + (dir.path() / "absent.pgm").string() +
                           " --family gaussian --param 25 --N 20 --seed 1 --out " +
                           (dir.path() / "out").string());
  CHECK(code == 2);
}

TEST_CASE("cli: train with 0 steps equals the random init, empty loss trace") {
  TempDir dir("cli_train0");
  RngStream rng(3, 0);
  fs::create_directories(dir.path() / "data");
  save_pgm(random_image(6, 6, rng), dir.path() / "data" / "img0.pgm");

  const int code = run_cli("train --data " + (dir.path() / "data").string() +
                           " --family gaussian --param 25 --N 10 --seed 77 --steps 0 "
                           "--hidden 16 --out " +
                           (dir.path() / "run").string());
  CHECK(code == 0);

  const Checkpoint checkpoint = load_checkpoint(dir.path() / "run" / "model.ckpt");
  RegressorConfig config;
  config.width = 6;
  config.height = 6;
  config.hidden = 16;
  const ToyRegressor untouched(config, 77);
  CHECK(checkpoint.model.parameters() == untouched.parameters());

  const std::string loss_csv = slurp(dir.path() / "run" / "loss.csv");
  CHECK(loss_csv.rfind("step,loss\n# version=", 0) == 0);  // header then metadata only
}

TEST_CASE("cli: train, rerun determinism, then sample from the checkpoint") {
  TempDir dir("cli_train_sample");
  RngStream rng(4, 0);
  fs::create_directories(dir.path() / "data");
  const Image clean = random_image(6, 6, rng, 60.0, 200.0);
  save_pgm(clean, dir.path() / "data" / "img0.pgm");

  const std::string train_args =
      "train --data " + (dir.path() / "data").string() +
      " --family gaussian --param 25 --N 10 --seed 9 --steps 40 --batch 4 --hidden 16 "
      "--out ";
  CHECK(run_cli(train_args + (dir.path() / "runA").string()) == 0);
  CHECK(run_cli(train_args + (dir.path() / "runB").string()) == 0);
  CHECK(same_bytes(dir.path() / "runA" / "model.ckpt", dir.path() / "runB" / "model.ckpt"));
  CHECK(same_bytes(dir.path() / "runA" / "loss.csv", dir.path() / "runB" / "loss.csv"));

  save_pgm(clean, dir.path() / "noisy.pgm");  // stand-in noisy input
  const std::string sample_args =
      "sample --in " + (dir.path() / "noisy.pgm").string() + " --model " +
      (dir.path() / "runA" / "model.ckpt").string() +
      " --family gaussian --n 2 --mean --trajectory --seed 13 --out ";
  CHECK(run_cli(sample_args + (dir.path() / "sampA").string()) == 0);
  CHECK(run_cli(sample_args + (dir.path() / "sampB").string()) == 0);

  CHECK(fs::exists(dir.path() / "sampA" / "sample_0.pgm"));
  CHECK(fs::exists(dir.path() / "sampA" / "sample_1.pgm"));
  CHECK(fs::exists(dir.path() / "sampA" / "mean.pgm"));
  // Trajectory frames t_10 .. t_0.
  for (int t = 0; t <= 10; ++t) {
    CHECK(fs::exists(dir.path() / "sampA" / "trajectory" /
                     ("t_" + std::to_string(t) + ".pgm")));
  }
  CHECK(same_bytes(dir.path() / "sampA" / "sample_0.pgm",
                   dir.path() / "sampB" / "sample_0.pgm"));
  CHECK(same_bytes(dir.path() / "sampA" / "mean.pgm", dir.path() / "sampB" / "mean.pgm"));

  // Family flag contradicting the checkpoint is a configuration error.
  const int mismatch = run_cli("sample --in " + (dir.path() / "noisy.pgm").string() +
                               " --model " + (dir.path() / "runA" / "model.ckpt").string() +
                               " --family gamma --param 26 --seed 13 --out " +
                               (dir.path() / "bad").string());
  CHECK(mismatch == 1);
}

TEST_CASE("cli: sample with the finite-prior oracle") {
  TempDir dir("cli_oracle");
  RngStream rng(5, 0);
  fs::create_directories(dir.path() / "prior");
  save_pgm(Image(5, 5, 100.0), dir.path() / "prior" / "a.pgm");
  save_pgm(Image(5, 5, 160.0), dir.path() / "prior" / "b.pgm");
  save_pgm(random_image(5, 5, rng, 80.0, 180.0), dir.path() / "noisy.pgm");

  const int code = run_cli("sample --in " + (dir.path() / "noisy.pgm").string() +
                           " --oracle --prior " + (dir.path() / "prior").string() +
                           " --family gaussian --param 25 --N 10 --n 3 --seed 21 --out " +
                           (dir.path() / "out").string());
  CHECK(code == 0);
  CHECK(fs::exists(dir.path() / "out" / "sample_2.pgm"));
}

TEST_CASE("cli: evaluate identical directories and the aggregate row") {
  TempDir dir("cli_eval");
  RngStream rng(6, 0);
  fs::create_directories(dir.path() / "gt");
  fs::create_directories(dir.path() / "cand");
  for (int i = 0; i < 3; ++i) {
    const Image img = random_image(16, 16, rng);
    save_pgm(img, dir.path() / "gt" / ("im" + std::to_string(i) + ".pgm"));
    save_pgm(img, dir.path() / "cand" / ("im" + std::to_string(i) + ".pgm"));
  }
  CHECK(run_cli("evaluate --gt " + (dir.path() / "gt").string() + " --cand " +
                (dir.path() / "cand").string() + " --out " +
                (dir.path() / "metrics").string()) == 0);
  const std::string csv = slurp(dir.path() / "metrics" / "metrics.csv");
  CHECK(csv.rfind("name,psnr_db,ssim\n", 0) == 0);
  CHECK(csv.find("im0.pgm,inf,1") != std::string::npos);
  CHECK(csv.find("aggregate,inf,1") != std::string::npos);
  CHECK(csv.find("# version=") != std::string::npos);

  // Unmatched filenames are reported with the offenders named.
  save_pgm(Image(16, 16, 0.0), dir.path() / "cand" / "extra.pgm");
  CHECK(run_cli("evaluate --gt " + (dir.path() / "gt").string() + " --cand " +
                (dir.path() / "cand").string() + " --out " +
                (dir.path() / "metrics2").string()) == 1);
}

TEST_CASE("cli: evaluate aggregate is the mean of finite rows") {
  TempDir dir("cli_eval_mean");
  RngStream rng(7, 0);
  fs::create_directories(dir.path() / "gt");
  fs::create_directories(dir.path() / "cand");
  const Image a = random_image(16, 16, rng);
  Image b = a;
  for (double& p : b.pixels) p = std::min(255.0, p + 10.0);
  save_pgm(a, dir.path() / "gt" / "x.pgm");
  save_pgm(a, dir.path() / "cand" / "x.pgm");  // infinite PSNR row
  save_pgm(a, dir.path() / "gt" / "y.pgm");
  save_pgm(b, dir.path() / "cand" / "y.pgm");  // finite PSNR row
  CHECK(run_cli("evaluate --gt " + (dir.path() / "gt").string() + " --cand " +
                (dir.path() / "cand").string() + " --out " +
                (dir.path() / "m").string()) == 0);
  const std::string csv = slurp(dir.path() / "m" / "metrics.csv");
  // Parse the y row and the aggregate row; aggregate PSNR must equal y's.
  std::istringstream lines(csv);
  std::string line;
  double y_psnr = -1.0;
  double agg_psnr = -2.0;
  while (std::getline(lines, line)) {
    if (line.rfind("y.pgm,", 0) == 0) {
      y_psnr = std::stod(line.substr(6));
    } else if (line.rfind("aggregate,", 0) == 0) {
      agg_psnr = std::stod(line.substr(10));
    }
  }
  CHECK(y_psnr == doctest::Approx(agg_psnr).epsilon(1e-12));
}

TEST_CASE("cli: train rejects mixed dataset dimensions") {
  TempDir dir("cli_train_mixed");
  RngStream rng(9, 0);
  fs::create_directories(dir.path() / "data");
  save_pgm(random_image(6, 6, rng), dir.path() / "data" / "a.pgm");
  save_pgm(random_image(8, 8, rng), dir.path() / "data" / "b.pgm");
  const int code = run_cli("train --data " + (dir.path() / "data").string() +
                           " --family gaussian --param 25 --N 10 --seed 1 --steps 5 "
                           "--out " +
                           (dir.path() / "run").string());
  CHECK(code == 1);
}

TEST_CASE("cli: verify exits 0 on the default suite and 3 under fault injection") {
  TempDir dir("cli_verify");
  CHECK(run_cli("verify --seed 7 --out " + (dir.path() / "ok").string()) == 0);
  CHECK(fs::exists(dir.path() / "ok" / "report.csv"));
  CHECK(run_cli("verify --seed 7 --inject-fault --out " +
                (dir.path() / "bad").string()) == 3);
}

TEST_CASE("cli: config file supplies defaults, flags override") {
  TempDir dir("cli_config");
  RngStream rng(8, 0);
  save_pgm(random_image(8, 8, rng), dir.path() / "clean.pgm");
  {
    std::ofstream config(dir.path() / "run.cfg");
    config << "[corrupt]\n";
    config << "family=gaussian\n";
    config << "param=25\n";
    config << "N=20\n";
    config << "seed=5\n";
  }
  const int code = run_cli("--config " + (dir.path() / "run.cfg").string() +
                           " corrupt --in " + (dir.path() / "clean.pgm").string() +
                           " --out " + (dir.path() / "out").string());
  CHECK(code == 0);
  CHECK(fs::exists(dir.path() / "out" / "clean_t20.pgm"));
}
