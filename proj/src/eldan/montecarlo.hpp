// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// Monte Carlo estimates of Gaussian tube measures, and statistics over many
// localization paths (mixture identity, density martingale, center law).
// Every sample and every path owns a counter-based substream, so results do
// not depend on the number of worker threads.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eldan/gaussian_geometry.hpp"
#include "eldan/localization.hpp"
#include "eldan/variety.hpp"

namespace eldan {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). The first exception thrown by any task is rethrown.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

struct Interval {
  double p_hat;
  double stderr_;
  double wilson_low;
  double wilson_high;
};

/// Binomial proportion with its normal-approximation standard error and the
/// Wilson score interval at z = 3 (99.7%).
Interval confidence_interval(std::int64_t hits, std::int64_t n);

/// Euclidean norm when `weights` is empty, otherwise |diag(weights) z|.
struct NormTag {
  std::vector<double> weights;
  bool euclidean() const { return weights.empty(); }
  std::string label() const;
};

struct TubeEstimate {
  double r;
  double p_hat;
  double stderr_;
  std::int64_t n_samples;
  std::int64_t n_hits;
  NormTag norm;
};

struct TubeOptions {
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  /// Gaussian perturbations of the sample used as extra starts.
  int perturbations = 8;
  NormTag norm;
};

struct TubeSweep {
  std::vector<TubeEstimate> rows;  // one per radius, same samples
  /// Samples for which no start reached the fiber.
  std::int64_t optimizer_failures = 0;
};

/// gamma_n(Z + r K) for every r of a strictly increasing grid, from common
/// samples. A sample z is a hit at r when the hit test finds w in Z with
/// |w - z|_K <= r; failures only lose hits, so p_hat errs low.
TubeSweep estimate_tube_sweep(const PolynomialMap& f,
                              std::span<const double> r_grid,
                              const TubeOptions& opts);
TubeEstimate estimate_tube_measure(const PolynomialMap& f, double r,
                                   const TubeOptions& opts);

struct WaistRow {
  double r;
  double p_hat;
  double stderr_;
  double baseline;
  double margin;  // p_hat - baseline
  bool pass;      // margin >= -3 stderr
};

struct WaistTable {
  std::vector<WaistRow> rows;
  std::int64_t optimizer_failures = 0;
  bool pass() const;
};

/// Compares tube estimates against the affine subspace baseline at the
/// supplied distance d = d(0, Z).
WaistTable waist_check(const PolynomialMap& f, std::span<const double> r_grid,
                       double distance, const TubeOptions& opts);

struct PathBatchOptions {
  double horizon = 10.0;
  double h = 1e-3;
  std::int64_t paths = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
};

/// Terminal state of one path, or the reason it aborted.
struct PathOutcome {
  std::optional<LocalizationState> state;
  std::string abort_reason;
  double max_post_residual = 0.0;
};

/// Independent paths from the base point; path i uses substream i.
std::vector<PathOutcome> simulate_paths(const PolynomialMap& f,
                                        const PathBatchOptions& opts);

struct MixtureRow {
  std::string tag;
  double mixture_mean;  // mean over paths of int phi d mu_T
  double reference;     // int phi d gamma_n
  double stderr_;
  double z_score;
};

struct MixtureReport {
  std::vector<MixtureRow> rows;
  std::int64_t n_paths = 0;  // paths that reached the horizon
  std::int64_t aborted = 0;
  double horizon = 0.0;
  double h = 0.0;
  bool valid() const { return aborted * 100 <= n_paths + aborted; }
};

/// Mixture identity from finished paths: for every functional the mean of
/// its exact integral against mu_T, and for every density point z the mean
/// of e^{-p_T(z)} against e^{-|z|^2/2}.
MixtureReport mixture_report(std::span<const PathOutcome> outcomes,
                             std::span<const TestFunctional> functionals,
                             std::span<const ComplexVec> density_points,
                             double horizon, double h);

/// simulate_paths + mixture_report. Requires f(0) = 0 with base point 0.
MixtureReport mixture_check(const PolynomialMap& f,
                            const PathBatchOptions& opts,
                            std::span<const TestFunctional> functionals,
                            std::span<const ComplexVec> density_points = {});

struct Moment {
  double mean;
  double stderr_;
};

struct CenterLaw {
  std::vector<ComplexVec> samples;  // a_T per finished path
  std::int64_t aborted = 0;
  double max_fiber_residual = 0.0;
  Moment squared_norm;              // |a_T|^2
  std::vector<Moment> re_mean;      // Re a_T^j
  std::vector<Moment> im_mean;      // Im a_T^j
  std::vector<Moment> abs2;         // |a_T^j|^2
  std::vector<Moment> re_square;    // Re (a_T^j)^2
  std::vector<Moment> im_square;    // Im (a_T^j)^2
};

CenterLaw center_law_from(const PolynomialMap& f,
                          std::span<const PathOutcome> outcomes);
CenterLaw center_law_sample(const PolynomialMap& f,
                            const PathBatchOptions& opts);

/// Mean and standard error of the mean, accumulated in index order.
Moment sample_moment(std::span<const double> xs);

}  // namespace eldan
