// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "eldan/localization.hpp"
#include "eldan/rng.hpp"

namespace eldan {
namespace {

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
            (PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                       {0xffffffffu, 0xffffffffu}),
            (PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u}),
            (PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(CounterRng, DeterministicPerStream) {
  CounterRng a(StreamId::of(7, StreamPurpose::path, 3));
  CounterRng b(StreamId::of(7, StreamPurpose::path, 3));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
  EXPECT_EQ(a.draws(), 100u);
}

TEST(CounterRng, PurposesAndIndicesGiveDistinctStreams) {
  std::set<double> firsts;
  for (auto p : {StreamPurpose::path, StreamPurpose::tube_sample,
                 StreamPurpose::distance_start, StreamPurpose::tilt_instance}) {
    for (std::uint64_t i = 0; i < 50; ++i) {
      CounterRng r(StreamId::of(11, p, i));
      firsts.insert(r.uniform());
    }
  }
  EXPECT_EQ(firsts.size(), 200u);
  CounterRng s1(StreamId::of(1, StreamPurpose::path, 0));
  CounterRng s2(StreamId::of(2, StreamPurpose::path, 0));
  EXPECT_NE(s1.uniform(), s2.uniform());
}

TEST(CounterRng, UniformIsInOpenIntervalWithCorrectMoments) {
  CounterRng r(StreamId::of(5, StreamPurpose::selftest, 0));
  const int m = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < m; ++i) {
    double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  double mean = sum / m;
  EXPECT_NEAR(mean, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / m));
  EXPECT_NEAR(sum2 / m - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(CounterRng, StandardComplexGaussianMoments) {
  CounterRng r(StreamId::of(6, StreamPurpose::selftest, 1));
  const int m = 100000;
  double re = 0, abs2 = 0, re_sq = 0;
  for (int i = 0; i < m; ++i) {
    Complex z = standard_complex_gaussian(r, 1)(0);
    re += z.real();
    abs2 += std::norm(z);
    re_sq += (z * z).real();
  }
  EXPECT_NEAR(re / m, 0.0, 3.0 / std::sqrt(m));
  // |z|^2 has variance 4 for unit-variance parts.
  EXPECT_NEAR(abs2 / m, 2.0, 3.0 * 2.0 / std::sqrt(m));
  EXPECT_NEAR(re_sq / m, 0.0, 3.0 * std::sqrt(2.0) / std::sqrt(m));
}

TEST(BrownianIncrement, ZeroStepIsZero) {
  CounterRng r(StreamId::of(1, StreamPurpose::path, 0));
  EXPECT_EQ(brownian_increment(r, 0.0, 3), ComplexVec::Zero(3));
  EXPECT_THROW(brownian_increment(r, -1.0, 3), Error);
}

TEST(BrownianIncrement, SampleMoments) {
  CounterRng r(StreamId::of(2, StreamPurpose::path, 0));
  const int m = 100000;
  double abs2 = 0;
  Complex cross = 0;
  double cross_abs2 = 0;
  for (int i = 0; i < m; ++i) {
    ComplexVec dw = brownian_increment(r, 1.0, 2);
    abs2 += std::norm(dw(0));
    Complex c = dw(0) * std::conj(dw(1));
    cross += c;
    cross_abs2 += std::norm(c);
  }
  EXPECT_NEAR(abs2 / m, 2.0, 0.05 * 2.0);
  // Each of Re, Im of the cross term has variance E|c|^2 / 2.
  double se = std::sqrt(cross_abs2 / m / 2.0 / m);
  EXPECT_LE(std::abs(cross.real() / m), 3.0 * se);
  EXPECT_LE(std::abs(cross.imag() / m), 3.0 * se);
}

}  // namespace
}  // namespace eldan
