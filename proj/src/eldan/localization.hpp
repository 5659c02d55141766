// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// Eldan's stochastic localization with the center confined to the fiber of a
// polynomial map. The process lives on quadratic potentials
//
//   p_t(z) = (z - a_t)* B_t (z - a_t) / 2 - log det B_t,
//
// driven by
//
//   d a_t = Sigma_t dW_t,   d B_t = B_t Sigma_t Sigma_t* B_t dt,
//
// with Sigma = n^{-1/2} B^{-1/2} pi, where pi is the orthogonal projection whose
// kernel is B^{-1/2} H(a) and H(a) is spanned by the conjugated gradients of
// the map at a. The discretization is Euler-Maruyama with a Gauss-Newton
// re-projection of the center onto the fiber after every step.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eldan/complex_gaussian.hpp"
#include "eldan/error.hpp"
#include "eldan/linalg.hpp"
#include "eldan/rng.hpp"
#include "eldan/variety.hpp"

namespace eldan {

class QuadraticPotential {
 public:
  /// Requires B positive-definite (lambda_min >= 1e-12).
  QuadraticPotential(ComplexVec center, HermitianMatrix matrix);

  const ComplexVec& center() const { return center_; }
  const HermitianMatrix& matrix() const { return matrix_; }
  double log_det() const { return log_det_; }

  /// (z - a)* B (z - a) / 2 - log det B
  double operator()(const ComplexVec& z) const;

 private:
  ComplexVec center_;
  HermitianMatrix matrix_;
  double log_det_;
};

QuadraticPotential standard_potential(int n);
double potential_eval(const QuadraticPotential& p, const ComplexVec& z);

struct LocalizationState {
  double t = 0.0;
  ComplexVec a;
  HermitianMatrix b;
  HermitianMatrix sigma_accum;  // int_0^t Sigma Sigma* ds
  double fiber_residual_max = 0.0;  // max pre-projection |f(a)|
  double last_fiber_residual = 0.0;
  double last_post_residual = 0.0;
  int k = 0;  // codimension of the fiber
  StreamId stream;

  /// t = 0, a = base point, B = Id.
  static LocalizationState initial(const PolynomialMap& f, StreamId stream);
  QuadraticPotential potential() const { return {a, b}; }
};

/// The diffusion matrix together with the pieces it is assembled from.
struct Diffusion {
  ComplexMat sigma;      // n^{-1/2} B^{-1/2} pi
  HermitianMatrix pi;    // projection with kernel B^{-1/2} H(a)
  RootPair roots;        // B^{1/2}, B^{-1/2}
};

Diffusion diffusion_of_state(const LocalizationState& state,
                             const PolynomialMap& f,
                             double fiber_tol = kFiberTol);
ComplexMat sigma_of_state(const LocalizationState& state,
                          const PolynomialMap& f);

/// Complex Brownian increment over a time step h: every coordinate is
/// g1 + i g2 with g1, g2 ~ N(0, h) independent, so E|dW^j|^2 = 2h.
ComplexVec brownian_increment(CounterRng& rng, double h, int n);

/// One Euler-Maruyama step followed by re-projection of the center.
LocalizationState step(const LocalizationState& state, const PolynomialMap& f,
                       double h, const ComplexVec& dw);

struct DiagnosticRow {
  double t;
  double fiber_residual;  // pre-projection |f(a_t)|
  double post_residual;   // |f(a_t)| after projection
  double lambda_min_b;
  double lambda_k1_b;     // lambda_{k+1}(B), NaN when k = n
  double trace_b;
  double accum_gap;       // |sigma_accum - (Id - B^{-1})|_HS
};

DiagnosticRow diagnostics_of(const LocalizationState& state);

struct PathOptions {
  double horizon = 10.0;
  double h = 1e-3;
  /// Record every `record_stride`-th step (and always the last one).
  int record_stride = 1;
};

/// Supplies dW for step `index` (0-based) of length h. Lets tests drive
/// several step sizes with the same underlying Brownian path.
using IncrementSource = std::function<ComplexVec(std::int64_t index, double h)>;

struct PathResult {
  LocalizationState state;
  std::vector<DiagnosticRow> rows;  // starts with the t = 0 row
};

/// Error that ends a path early; keeps what was recorded so far.
class PathAbort : public Error {
 public:
  PathAbort(const Error& cause, PathResult partial)
      : Error(cause.kind(), std::string("path aborted: ") + cause.what()),
        partial_(std::move(partial)) {}
  const PathResult& partial() const { return partial_; }

 private:
  PathResult partial_;
};

/// Number of Euler steps used for a horizon; the step is then horizon/steps.
std::int64_t step_count(double horizon, double h);

/// Simulates one path from the base point with B_0 = Id. Deterministic in
/// (stream, horizon, h).
PathResult run_path(const PolynomialMap& f, const PathOptions& opts,
                    StreamId stream);
PathResult run_path(const PolynomialMap& f, const PathOptions& opts,
                    StreamId stream, const IncrementSource& increments);

/// mu_T: center a_T and covariance 2 B_T^{-1}, with eigenvalues below
/// rank_tol set to zero. Checks lambda_{n-k}(2 B_T^{-1}) <= 2n(k+1)/T.
ComplexGaussian terminal_gaussian(const LocalizationState& state,
                                  double rank_tol);

/// Ascending eigenvalue lambda_{n-k} of 2 B^{-1}, i.e. 2 / lambda_{k+1}(B).
double collapsing_covariance_eigenvalue(const LocalizationState& state);

}  // namespace eldan
