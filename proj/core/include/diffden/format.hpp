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

#ifndef DIFFDEN_FORMAT_HPP_
#define DIFFDEN_FORMAT_HPP_

#include <charconv>
#include <cmath>
#include <string>

namespace diffden {

// Shortest decimal rendering that round-trips the exact double. Every text
// artifact (CSV rows, provenance blocks, checkpoint metadata) goes through
// this so reruns are byte-identical and parsing back is lossless.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace diffden

#endif  // DIFFDEN_FORMAT_HPP_
