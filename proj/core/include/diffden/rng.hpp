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

#ifndef DIFFDEN_RNG_HPP_
#define DIFFDEN_RNG_HPP_

#include <cstdint>

namespace diffden {

namespace detail {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). Used both to expand seeds
// into xoshiro state and to hash (seed, stream) pairs.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Counter-keyed xoshiro256++ stream (Blackman & Vigna 2018), state derived
// from (seed, stream_id) with SplitMix64. The same pair always reproduces the
// same draw sequence; distinct stream ids give statistically independent
// streams. Integer output is platform-exact; the floating-point helpers are
// exact given one libm build.
//
// Streams are single-owner: hand each worker its own fork(), never a shared
// reference.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_(stream_id) {
    std::uint64_t h = detail::mix64(seed ^ detail::mix64(stream_id));
    state_[0] = detail::mix64(h);
    state_[1] = detail::mix64(h + 1);
    state_[2] = detail::mix64(h + 2);
    state_[3] = detail::mix64(h + 3);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double next_open() { return 1.0 - next_double(); }

  // Child stream independent of this one and of other children ids.
  RngStream fork(std::uint64_t child_id) const {
    return RngStream(seed_, detail::mix64(stream_ ^ detail::mix64(child_id + 0x633d5169UL)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace diffden

#endif  // DIFFDEN_RNG_HPP_
