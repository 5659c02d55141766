// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/rng.hpp"

#include <cmath>
#include <numbers>

namespace eldan {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxBlock philox4x32(PhiloxBlock c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

PhiloxBlock CounterRng::next_block() {
  PhiloxBlock ctr{static_cast<std::uint32_t>(counter_),
                  static_cast<std::uint32_t>(counter_ >> 32),
                  static_cast<std::uint32_t>(id_.index),
                  static_cast<std::uint32_t>(id_.index >> 32)};
  PhiloxKey key{static_cast<std::uint32_t>(id_.seed),
                static_cast<std::uint32_t>(id_.seed >> 32)};
  ++counter_;
  return philox4x32(ctr, key);
}

double CounterRng::uniform() {
  auto b = next_block();
  return to_open_unit((static_cast<std::uint64_t>(b[1]) << 32) | b[0]);
}

std::array<double, 2> CounterRng::normal_pair() {
  auto b = next_block();
  double u1 = to_open_unit((static_cast<std::uint64_t>(b[1]) << 32) | b[0]);
  double u2 = to_open_unit((static_cast<std::uint64_t>(b[3]) << 32) | b[2]);
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

Complex CounterRng::complex_normal(double variance_per_part) {
  auto g = normal_pair();
  double s = std::sqrt(variance_per_part);
  return {s * g[0], s * g[1]};
}

ComplexVec standard_complex_gaussian(CounterRng& rng, int n) {
  ComplexVec z(n);
  for (int j = 0; j < n; ++j) z(j) = rng.complex_normal(1.0);
  return z;
}

}  // namespace eldan
