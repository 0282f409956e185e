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

#include "diffden/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace diffden {

Image::Image(int w, int h, double fill) {
  if (w <= 0 || h <= 0) {
    throw std::invalid_argument("Image dimensions must be positive, got " +
                                std::to_string(w) + "x" + std::to_string(h));
  }
  width = w;
  height = h;
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

void require_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(
        "image shape mismatch: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
        " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

bool all_finite(const Image& img) {
  return std::all_of(img.pixels.begin(), img.pixels.end(),
                     [](double p) { return std::isfinite(p); });
}

Image scale_to_model(const Image& img) {
  Image out = img;
  for (double& p : out.pixels) p = p / (kPixelMax / 2.0) - 1.0;
  return out;
}

Image scale_from_model(const Image& img) {
  Image out = img;
  for (double& p : out.pixels) p = (p + 1.0) * (kPixelMax / 2.0);
  return out;
}

Image floor_pixels(const Image& img, double floor_value) {
  Image out = img;
  for (double& p : out.pixels) p = std::max(p, floor_value);
  return out;
}

}  // namespace diffden
