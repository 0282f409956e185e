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

#include "diffden/pgm.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "diffden/errors.hpp"

namespace diffden {

namespace {

// Reads one header token, skipping whitespace and '#' comment lines.
std::string next_token(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF) throw io_error(path + ": truncated PGM header");
  std::string token;
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  return token;
}

int parse_positive(const std::string& token, const std::string& path, const char* what) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size() || value <= 0) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw io_error(path + ": bad PGM " + what + " '" + token + "'");
  }
}

}  // namespace

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path.string() + ": cannot open");

  const std::string magic = next_token(in, path.string());
  if (magic != "P5") throw io_error(path.string() + ": expected P5 magic, got '" + magic + "'");

  const int width = parse_positive(next_token(in, path.string()), path.string(), "width");
  const int height = parse_positive(next_token(in, path.string()), path.string(), "height");
  const int maxval = parse_positive(next_token(in, path.string()), path.string(), "maxval");
  if (maxval != 255) {
    throw io_error(path.string() + ": unsupported maxval " + std::to_string(maxval) +
                   " (only 8-bit maxval 255)");
  }
  // Exactly one whitespace byte separates the header from the payload; the
  // token reader has already consumed it.

  Image img(width, height);
  std::string payload(img.size(), '\0');
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw io_error(path.string() + ": truncated PGM payload");
  }
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.pixels[i] = static_cast<double>(static_cast<std::uint8_t>(payload[i]));
  }
  return img;
}

void save_pgm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path.string() + ": cannot open for writing");

  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::string payload(img.size(), '\0');
  for (std::size_t i = 0; i < img.size(); ++i) {
    double p = std::round(img.pixels[i]);
    if (p < 0.0) p = 0.0;
    if (p > kPixelMax) p = kPixelMax;
    payload[i] = static_cast<char>(static_cast<std::uint8_t>(p));
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw io_error(path.string() + ": write failed");
}

}  // namespace diffden
