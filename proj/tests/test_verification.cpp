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
#include <chrono>
#include <sstream>

#include <doctest.h>

#include "diffden/verification.hpp"
#include "diffden/version.hpp"

using namespace diffden;

TEST_CASE("verification suite: default seeds pass every identity within budget") {
  VerifyConfig config;
  const auto start = std::chrono::steady_clock::now();
  const SuiteResult result = run_verification_suite(config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 600.0);  // single-core budget
  CHECK(result.all_pass);
  CHECK(result.rows.size() > 40);
  for (const SuiteRow& row : result.rows) {
    CAPTURE(row.suite);
    CAPTURE(row.name);
    CHECK(row.report.pass);
    CHECK(row.report.p_value >= 0.0);
    CHECK(row.report.p_value <= 1.0);
    CHECK(row.report.pass == (row.report.p_value >= row.report.significance));
  }
}

TEST_CASE("verification suite: CSV format and determinism") {
  VerifyConfig config;
  config.seed = 20240817;
  const SuiteResult a = run_verification_suite(config);
  const SuiteResult b = run_verification_suite(config);

  std::ostringstream csv_a;
  std::ostringstream csv_b;
  write_suite_csv(a, csv_a, config.seed, kVersion);
  write_suite_csv(b, csv_b, config.seed, kVersion);
  CHECK(csv_a.str() == csv_b.str());

  const std::string text = csv_a.str();
  CHECK(text.rfind("suite_name,test_name,statistic,p_value,threshold,verdict,seed,n\n", 0) ==
        0);
  CHECK(text.find("# version=") != std::string::npos);
  CHECK(text.find("seed=20240817") != std::string::npos);
  // One row per report plus header and trailing comment.
  const std::size_t lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == a.rows.size() + 2);
}

TEST_CASE("verification suite: fault injection is caught") {
  VerifyConfig config;
  config.inject_fault = true;
  const SuiteResult result = run_verification_suite(config);
  CHECK_FALSE(result.all_pass);
  bool schedule_row_failed = false;
  for (const SuiteRow& row : result.rows) {
    if (row.suite == "schedule" && !row.report.pass) schedule_row_failed = true;
  }
  CHECK(schedule_row_failed);
}
