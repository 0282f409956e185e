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

#ifndef DIFFDEN_PGM_HPP_
#define DIFFDEN_PGM_HPP_

#include <filesystem>

#include "diffden/image.hpp"

namespace diffden {

// Binary 8-bit P5 portable graymap, maxval 255 only. Loading any other
// variant (ASCII P2, 16-bit maxval) throws io_error.
Image load_pgm(const std::filesystem::path& path);

// Writes canonical "P5\n<w> <h>\n255\n" + payload. Pixels are clamped to
// [0, 255] and rounded to nearest. save(load(f)) is byte-identical for files
// in canonical form.
void save_pgm(const Image& img, const std::filesystem::path& path);

}  // namespace diffden

#endif  // DIFFDEN_PGM_HPP_
