// Copyright 2026 The qstsim Authors
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

#include <cmath>
#include <cstdint>
#include <random>

namespace qst {

/// One step of the splitmix64 output function. Used for seed derivation so
/// that sibling streams (workers, repetitions) are decorrelated regardless of
/// the order in which they are created.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of worker `worker_id`'s data-generation stream.
constexpr std::uint64_t shard_seed(std::uint64_t master, std::uint64_t worker_id) {
  return master ^ splitmix64(worker_id);
}

/// Seed of worker `worker_id`'s batch-index stream inside the optimizer.
/// Tagged so it never collides with the data-generation stream above.
constexpr std::uint64_t batch_seed(std::uint64_t master, std::uint64_t worker_id) {
  return splitmix64(master ^ splitmix64(worker_id) ^ 0xB5297A4D3A2F1C9Bull);
}

/// Seed of repetition `rep` in a seed-averaged sweep.
constexpr std::uint64_t rep_seed(std::uint64_t master, std::uint64_t rep) {
  return splitmix64(master ^ splitmix64(rep) ^ 0x6A09E667F3BCC909ull);
}

/// Deterministic random stream. Wraps std::mt19937_64, whose raw output is
/// fully specified by the standard; the conversions below are hand-rolled so
/// results are bit-identical across standard libraries (the std::*_distribution
/// classes are implementation-defined and would not be).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) via rejection sampling (unbiased).
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Standard normal via Box-Muller; generates pairs, caches the second.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace qst
