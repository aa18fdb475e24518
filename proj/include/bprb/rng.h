// Copyright 2026 the bprb Authors
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

#ifndef BPRB_RNG_H_
#define BPRB_RNG_H_

#include <array>
#include <cstdint>
#include <vector>

namespace bprb {

// xoshiro256** (Blackman & Vigna) seeded through splitmix64, so a stream is
// fully determined by the 64-bit seed on every platform:
//
//   state[k] = splitmix64(seed) for k = 0..3, where splitmix64 advances
//              s += 0x9e3779b97f4a7c15 and mixes with the standard
//              (30, 27, 31) shift/multiply finalizer.
//   NextU64   = rotl(state[1] * 5, 7) * 9, followed by the reference update.
//   Uniform() = (NextU64() >> 11) * 2^-53, in [0, 1).
//   UniformInt(n) draws NextU64() until it lands in the largest multiple of
//              n below 2^64 and returns it modulo n (unbiased).
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed);

  uint64_t NextU64();
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t k = static_cast<size_t>(UniformInt(i));
      std::swap(values[i - 1], values[k]);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~uint64_t{0}; }
  result_type operator()() { return NextU64(); }

 private:
  std::array<uint64_t, 4> state_;
};

}  // namespace bprb

#endif  // BPRB_RNG_H_
