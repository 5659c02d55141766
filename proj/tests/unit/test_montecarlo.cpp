// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "eldan/montecarlo.hpp"
#include "test_util.hpp"

namespace eldan {
namespace {

TEST(ConfidenceInterval, Examples) {
  auto a = confidence_interval(0, 100);
  EXPECT_EQ(a.p_hat, 0.0);
  EXPECT_EQ(a.wilson_low, 0.0);
  EXPECT_GT(a.wilson_high, 0.0);
  auto b = confidence_interval(50, 100);
  EXPECT_EQ(b.p_hat, 0.5);
  EXPECT_NEAR(b.stderr_, 0.05, 1e-15);
  EXPECT_THROW(confidence_interval(101, 100), Error);
  EXPECT_THROW(confidence_interval(0, 0), Error);
  EXPECT_THROW(confidence_interval(-1, 10), Error);
}

TEST(ConfidenceInterval, WilsonContainsEstimateProperty) {
  std::mt19937_64 gen(61);
  for (int t = 0; t < 1000; ++t) {
    std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 100000)(gen);
    std::int64_t hits = std::uniform_int_distribution<std::int64_t>(0, n)(gen);
    auto ci = confidence_interval(hits, n);
    EXPECT_LE(ci.wilson_low, ci.p_hat);
    EXPECT_GE(ci.wilson_high, ci.p_hat);
    EXPECT_GE(ci.wilson_low, 0.0);
    EXPECT_LE(ci.wilson_high, 1.0);
    EXPECT_NEAR(ci.stderr_, std::sqrt(ci.p_hat * (1 - ci.p_hat) / n), 1e-15);
  }
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> seen(1000);
  parallel_for(1000, 4, [&](std::int64_t i) { seen[i]++; });
  for (auto& s : seen) EXPECT_EQ(s.load(), 1);
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::int64_t i) {
                              if (i == 57) fail(ErrorKind::state, "boom");
                            }),
               Error);
}

TEST(TubeEstimate, AffineMatchesBaseline) {
  const Complex c(0.3, 0.4);
  auto f = testutil::affine_map(2, c);
  TubeOptions opts;
  opts.samples = 100000;
  opts.seed = 42;
  auto e = estimate_tube_measure(f, 1.0, opts);
  EXPECT_EQ(e.n_samples, 100000);
  EXPECT_DOUBLE_EQ(e.p_hat, double(e.n_hits) / e.n_samples);
  EXPECT_NEAR(e.p_hat, disc_measure(1, std::abs(c), 1.0), 3 * e.stderr_);
}

TEST(TubeEstimate, ZeroRadiusHasNoHits) {
  TubeOptions opts;
  opts.samples = 500;
  opts.seed = 1;
  auto e = estimate_tube_measure(testutil::hyperbola(), 0.0, opts);
  EXPECT_EQ(e.n_hits, 0);
  EXPECT_EQ(e.p_hat, 0.0);
}

TEST(TubeEstimate, Validation) {
  TubeOptions opts;
  opts.samples = 0;
  EXPECT_THROW(estimate_tube_measure(testutil::hyperbola(), 1.0, opts), Error);
  opts.samples = 10;
  EXPECT_THROW(estimate_tube_measure(testutil::hyperbola(), -1.0, opts), Error);
  opts.norm.weights = {1.0};
  EXPECT_THROW(estimate_tube_measure(testutil::hyperbola(), 1.0, opts), Error);
}

TEST(TubeSweep, NestedRadiiProperty) {
  TubeOptions opts;
  opts.samples = 2000;
  opts.seed = 5;
  std::vector<double> grid{0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
  auto sweep = estimate_tube_sweep(testutil::hyperbola(), grid, opts);
  ASSERT_EQ(sweep.rows.size(), grid.size());
  for (std::size_t i = 1; i < grid.size(); ++i)
    EXPECT_LE(sweep.rows[i - 1].n_hits, sweep.rows[i].n_hits);
  // Single-radius estimates agree with the sweep on common samples.
  EXPECT_EQ(estimate_tube_measure(testutil::hyperbola(), 1.0, opts).n_hits, sweep.rows[3].n_hits);
}

TEST(TubeSweep, DeterministicAcrossThreadCounts) {
  TubeOptions opts;
  opts.samples = 600;
  opts.seed = 9;
  std::vector<double> grid{0.5, 1.0};
  opts.threads = 1;
  auto a = estimate_tube_sweep(testutil::paraboloid(), grid, opts);
  opts.threads = 3;
  auto b = estimate_tube_sweep(testutil::paraboloid(), grid, opts);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(a.rows[i].n_hits, b.rows[i].n_hits);
  EXPECT_EQ(a.optimizer_failures, b.optimizer_failures);
}

TEST(TubeSweep, MoreStartsNeverLoseHitsProperty) {
  std::vector<double> grid{0.3, 0.6, 1.0, 1.5};
  std::vector<std::int64_t> prev(grid.size(), 0);
  for (int starts : {0, 2, 8, 16}) {
    TubeOptions opts;
    opts.samples = 1500;
    opts.seed = 13;
    opts.perturbations = starts;
    auto sweep = estimate_tube_sweep(testutil::hyperbola(), grid, opts);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_GE(sweep.rows[i].n_hits, prev[i]) << starts << " " << grid[i];
      prev[i] = sweep.rows[i].n_hits;
    }
  }
}

TEST(TubeSweep, CircledNormTagsRows) {
  TubeOptions opts;
  opts.samples = 300;
  opts.seed = 3;
  opts.norm.weights = {1.0, 2.0};
  std::vector<double> grid{0.5, 1.0};
  auto sweep = estimate_tube_sweep(testutil::hyperbola(), grid, opts);
  EXPECT_FALSE(sweep.rows[0].norm.euclidean());
  EXPECT_NE(sweep.rows[0].norm.label(), NormTag{}.label());
  EXPECT_LE(sweep.rows[0].n_hits, sweep.rows[1].n_hits);
}

TEST(WaistCheck, HyperbolaPassesSmall) {
  TubeOptions opts;
  opts.samples = 3000;
  opts.seed = 17;
  std::vector<double> grid{0.5, 1.0, 2.0};
  auto table = waist_check(testutil::hyperbola(), grid, std::sqrt(2.0), opts);
  EXPECT_TRUE(table.pass());
  for (const auto& row : table.rows) {
    EXPECT_DOUBLE_EQ(row.baseline, affine_tube_measure(2, 1, std::sqrt(2.0), row.r));
    EXPECT_DOUBLE_EQ(row.margin, row.p_hat - row.baseline);
  }
}

TEST(WaistCheck, AffineEqualityCaseBracketsZero) {
  const Complex c(0.0, 0.8);
  TubeOptions opts;
  opts.samples = 20000;
  opts.seed = 19;
  std::vector<double> grid{0.5, 1.0, 2.0};
  auto table = waist_check(testutil::affine_map(3, c), grid, 0.8, opts);
  for (const auto& row : table.rows) EXPECT_LE(std::abs(row.margin), 3 * row.stderr_) << row.r;
  EXPECT_EQ(table.optimizer_failures, 0);
}

PathBatchOptions small_batch(std::int64_t paths, double horizon, double h, std::uint64_t seed) {
  PathBatchOptions o;
  o.paths = paths;
  o.horizon = horizon;
  o.h = h;
  o.seed = seed;
  return o;
}

TEST(Mixture, ConstantFunctionalIsExact) {
  std::vector<TestFunctional> phis{functional::One{}};
  auto rep = mixture_check(testutil::paraboloid(), small_batch(20, 1.0, 1e-2, 1), phis);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].mixture_mean, 1.0);
  EXPECT_EQ(rep.rows[0].z_score, 0.0);
  EXPECT_EQ(rep.n_paths, 20);
  EXPECT_TRUE(rep.valid());
}

TEST(Mixture, AffineHalfSpace) {
  std::vector<TestFunctional> phis{functional::HalfSpace{ComplexVec::Unit(2, 1), 0.0}};
  auto rep = mixture_check(testutil::affine_map(2, 0.0), small_batch(300, 5.0, 1e-2, 2), phis);
  EXPECT_NEAR(rep.rows[0].mixture_mean, 0.5, 3 * rep.rows[0].stderr_);
  EXPECT_EQ(rep.rows[0].reference, 0.5);
}

TEST(Mixture, ZScoresOverSeedsProperty) {
  std::vector<TestFunctional> phis{
      functional::One{}, functional::SquaredNorm{},
      functional::HalfSpace{ComplexVec::Unit(2, 1), 0.2},
      functional::BoundedExp{ComplexVec::Unit(2, 1) * 0.5, 2.0}};
  int exceed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rep = mixture_check(testutil::affine_map(2, 0.0), small_batch(50, 2.0, 1e-2, seed), phis);
    for (const auto& row : rep.rows) {
      EXPECT_TRUE(std::isfinite(row.z_score));
      if (std::abs(row.z_score) > 3) ++exceed;
    }
  }
  EXPECT_LE(exceed, 1);
}

TEST(Mixture, DensityRows) {
  std::vector<ComplexVec> points{ComplexVec::Zero(2), ComplexVec::Unit(2, 0) * 0.5};
  auto rep = mixture_check(testutil::paraboloid(), small_batch(200, 1.0, 1e-2, 4), {}, points);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_NEAR(rep.rows[0].reference, 1.0, 1e-15);
  EXPECT_NEAR(rep.rows[1].reference, std::exp(-0.125), 1e-15);
  for (const auto& row : rep.rows) EXPECT_LE(std::abs(row.z_score), 4.0);
}

TEST(Mixture, RequiresBaseAtOrigin) {
  std::vector<TestFunctional> phis{functional::One{}};
  try {
    mixture_check(testutil::hyperbola(), small_batch(2, 1.0, 1e-2, 0), phis);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
    EXPECT_EQ(e.path(), "/map/base_point");
  }
}

TEST(SimulatePaths, DeterministicAcrossThreadCounts) {
  auto o = small_batch(8, 0.5, 1e-2, 7);
  o.threads = 1;
  auto a = simulate_paths(testutil::quadric3(), o);
  o.threads = 4;
  auto b = simulate_paths(testutil::quadric3(), o);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_TRUE(a[i].state && b[i].state);
    EXPECT_EQ(a[i].state->a, b[i].state->a);
    EXPECT_EQ(a[i].state->b.matrix(), b[i].state->b.matrix());
  }
}

TEST(CenterLaw, AffineMoments) {
  auto law = center_law_sample(testutil::affine_map(2, 0.0), small_batch(400, 20.0, 1e-2, 8));
  ASSERT_EQ(law.samples.size(), 400u);
  for (const auto& a : law.samples) EXPECT_EQ(a(0), Complex(0));
  EXPECT_NEAR(law.abs2[1].mean, 2.0, 3 * law.abs2[1].stderr_);
  EXPECT_NEAR(law.re_mean[1].mean, 0.0, 3 * law.re_mean[1].stderr_);
  EXPECT_NEAR(law.re_square[1].mean, 0.0, 3 * law.re_square[1].stderr_);
  EXPECT_LE(law.squared_norm.mean, 4.0 + 3 * law.squared_norm.stderr_);
  EXPECT_LE(law.max_fiber_residual, 1e-10);
  EXPECT_EQ(law.aborted, 0);
}

TEST(SampleMoment, Examples) {
  std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  auto m = sample_moment(xs);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.stderr_, std::sqrt(5.0 / 3.0 / 4), 1e-15);
}

}  // namespace
}  // namespace eldan
