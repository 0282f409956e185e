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

#ifndef DIFFDEN_TESTS_TEST_SUPPORT_HPP_
#define DIFFDEN_TESTS_TEST_SUPPORT_HPP_

#include <unistd.h>

#include <filesystem>
#include <string>

#include "diffden/image.hpp"
#include "diffden/rng.hpp"

namespace diffden::testing {

inline Image random_image(int w, int h, RngStream& rng, double lo = 0.0, double hi = 255.0) {
  Image img(w, h);
  for (double& p : img.pixels) p = lo + (hi - lo) * rng.next_double();
  return img;
}

// Fresh scratch directory under the system temp root, unique per call.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("diffden_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace diffden::testing

#endif  // DIFFDEN_TESTS_TEST_SUPPORT_HPP_
