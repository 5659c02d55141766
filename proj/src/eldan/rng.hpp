// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// Counter-based random numbers (Philox4x32-10). A stream is addressed by a
// (seed, stream index) pair, so every path or Monte Carlo sample owns an
// independent sequence regardless of which worker thread evaluates it.

#pragma once

#include <array>
#include <cstdint>

#include "eldan/linalg.hpp"

namespace eldan {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 bijection.
PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key);

/// Domain tags, mixed into the top byte of the stream index so that
/// different consumers of the same master seed never share a sequence.
enum class StreamPurpose : std::uint8_t {
  path = 1,
  tube_sample = 2,
  distance_start = 3,
  tilt_instance = 4,
  selftest = 5,
};

struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  static StreamId of(std::uint64_t seed, StreamPurpose purpose,
                     std::uint64_t index) {
    return {seed, (static_cast<std::uint64_t>(purpose) << 56) ^ index};
  }
};

class CounterRng {
 public:
  explicit CounterRng(StreamId id) : id_(id) {}

  /// Next 128 random bits; advances the draw counter by one.
  PhiloxBlock next_block();
  /// Uniform in the open interval (0, 1).
  double uniform();
  /// Pair of independent standard normals (Box-Muller on one block).
  std::array<double, 2> normal_pair();
  /// g1 + i g2 with g1, g2 independent N(0, variance_per_part).
  Complex complex_normal(double variance_per_part);

  StreamId id() const { return id_; }
  std::uint64_t draws() const { return counter_; }

 private:
  StreamId id_;
  std::uint64_t counter_ = 0;
};

/// Standard complex Gaussian vector in C^n with density (2 pi)^{-n} e^{-|z|^2/2}
/// (real and imaginary parts of each coordinate have unit variance).
ComplexVec standard_complex_gaussian(CounterRng& rng, int n);

}  // namespace eldan
