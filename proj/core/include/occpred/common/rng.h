/*
 * Copyright 2026 The occpred Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OCCPRED_COMMON_RNG_H_
#define OCCPRED_COMMON_RNG_H_

#include <array>
#include <cstdint>
#include <span>

namespace occpred {

// splitmix64 finalizer; used for seeding and for deriving sub-seeds.
std::uint64_t SplitMix64(std::uint64_t& state);

// Deterministically derives an independent seed for sub-task `stream` of a
// command rooted at `root`.
std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t stream);

// xoshiro256** with portable distribution helpers. The std:: distributions are
// implementation-defined, so everything that feeds reproducible artifacts goes
// through these methods instead.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return Next(); }

  std::uint64_t Next();
  // Uniform in [0, 1) with 53 bits of precision.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t Below(std::uint64_t n);
  // Standard normal via Box-Muller (one value per call, no caching).
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace occpred

#endif  // OCCPRED_COMMON_RNG_H_
