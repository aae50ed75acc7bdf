// Copyright 2026 The nvextract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Portable seeded randomness.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Standard distributions are not (their algorithms are left to the
// library vendor), so the helpers below derive uniform doubles, bounded
// integers and shuffles from raw engine output themselves:
//
//   uniform()   top 53 bits of one draw, scaled to [0, 1)
//   below(n)    rejection sampling on one draw per attempt
//   shuffle     Fisher-Yates from the back, j = below(k + 1)
//
// mix64 is the SplitMix64 finalizer, used to derive independent seeds.

#ifndef NVX_RNG_HPP_
#define NVX_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace nvx {

constexpr uint64_t mix64(uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr uint64_t mix64(uint64_t a, uint64_t b) noexcept {
  return mix64(mix64(a) ^ (b + 0x632BE59BD9B4E019ULL));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return uniform() < p; }

  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      const uint64_t x = engine_();
      if (x < limit) return x % n;
    }
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t k = items.size(); k > 1; --k) {
      const auto j = static_cast<std::size_t>(below(k));
      using std::swap;
      swap(items[k - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nvx

#endif  // NVX_RNG_HPP_
