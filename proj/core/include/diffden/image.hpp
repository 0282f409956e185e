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

#ifndef DIFFDEN_IMAGE_HPP_
#define DIFFDEN_IMAGE_HPP_

#include <cstddef>
#include <vector>

namespace diffden {

// Canonical pixel domain. Clean images live in [0, 255]; Gaussian-corrupted
// images may leave it and are carried unclamped.
inline constexpr double kPixelMax = 255.0;

// Positivity floor applied to clean images before Gamma or Poisson
// corruption: both families divide by or take log of x0.
inline constexpr double kEpsilonFloor = 1e-3;

// Row-major grayscale image of doubles. Immutable by convention once built;
// every operation in the library returns fresh images.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int w, int h, double fill = 0.0);

  std::size_t size() const { return pixels.size(); }
  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height;
  }
};

// Throws std::invalid_argument unless both images have identical dimensions.
void require_same_shape(const Image& a, const Image& b);

// True iff every pixel is finite.
bool all_finite(const Image& img);

// Affine map [0,255] -> [-1,1]: p/127.5 - 1. Total on finite inputs; values
// outside the canonical range map through the same line (no clamping).
Image scale_to_model(const Image& img);

// Exact inverse of scale_to_model.
Image scale_from_model(const Image& img);

// max(p, floor_value) per pixel.
Image floor_pixels(const Image& img, double floor_value = kEpsilonFloor);

}  // namespace diffden

#endif  // DIFFDEN_IMAGE_HPP_
