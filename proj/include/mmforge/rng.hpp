// Copyright 2026 The mmforge Authors
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

#pragma once

// Counter-based random streams. A stream is identified by a 64-bit key
// derived from (seed, purpose tag, optional indices); the n-th draw is a
// pure function of (key, n), so results never depend on evaluation order or
// thread schedule.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace mmforge {

inline constexpr uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr uint64_t Fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t StreamKey(uint64_t seed, std::string_view tag,
                          std::initializer_list<uint64_t> indices = {}) {
  uint64_t k = SplitMix64(seed ^ SplitMix64(Fnv1a64(tag)));
  for (uint64_t i : indices) k = SplitMix64(k ^ SplitMix64(i + 0x632be59bd9b4e019ULL));
  return k;
}

class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(key) {}
  CounterRng(uint64_t seed, std::string_view tag, std::initializer_list<uint64_t> indices = {})
      : key_(StreamKey(seed, tag, indices)) {}

  uint64_t NextU64() { return SplitMix64(key_ + SplitMix64(counter_++)); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; each call consumes two draws.
  double Gaussian() {
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace mmforge
