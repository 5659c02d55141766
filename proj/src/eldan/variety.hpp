// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// Holomorphic polynomial maps f: C^n -> C^k, their fibers Z = f^{-1}(0), and
// the Gauss-Newton machinery that keeps points on Z.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eldan/linalg.hpp"

namespace eldan {

/// Default feasibility tolerance for points of the fiber.
inline constexpr double kFiberTol = 1e-10;
/// Smallest singular value of the Jacobian accepted as full rank.
inline constexpr double kRankTol = 1e-8;

struct Monomial {
  Complex coeff;
  std::vector<int> exps;  // length n, nonnegative
};

using Component = std::vector<Monomial>;

class PolynomialMap {
 public:
  /// Validates exponent lengths, that `base_point` lies on the fiber
  /// (|f| <= 1e-12) and that the Jacobian there has rank k.
  PolynomialMap(int n, std::vector<Component> components,
                ComplexVec base_point);

  int n() const { return n_; }
  int k() const { return static_cast<int>(components_.size()); }
  const std::vector<Component>& components() const { return components_; }
  const ComplexVec& base_point() const { return base_point_; }

  /// f(z), length k.
  ComplexVec eval(const ComplexVec& z) const;
  /// k x n matrix of holomorphic partial derivatives df_j/dz_l.
  ComplexMat jacobian(const ComplexVec& z) const;
  /// f(z) and its Jacobian from one pass over the monomials.
  void eval_with_jacobian(const ComplexVec& z, ComplexVec& value,
                          ComplexMat& jac) const;

  /// The map u -> f(W^{-1} u) with W = diag(weights). Distances measured by
  /// |W(w - z)| for f become Euclidean distances for the scaled map.
  PolynomialMap with_coordinate_scaling(std::span<const double> weights) const;

 private:
  void check_dim(const ComplexVec& z) const;
  int n_;
  int max_degree_ = 0;
  std::vector<Component> components_;
  ComplexVec base_point_;
};

struct FiberPoint {
  ComplexVec point;
  double residual;  // |f(point)|
};

ComplexVec eval_map(const PolynomialMap& f, const ComplexVec& z);
ComplexMat eval_jacobian(const PolynomialMap& f, const ComplexVec& z);

/// Orthonormal basis of span{(grad f_j(z))*}, i.e. the range of J(z)*.
/// Throws a singularity error if the smallest singular value of J(z) is
/// below `rank_tol`.
SubspaceBasis gradient_subspace(const PolynomialMap& f, const ComplexVec& z,
                                double rank_tol = kRankTol);

/// Gauss-Newton z <- z - J*(JJ*)^{-1} f(z) until |f(z)| <= tol, followed by
/// one polishing step that is kept only if it lowers the residual further.
/// Steps are halved when they do not decrease the residual.
FiberPoint project_to_fiber(const PolynomialMap& f, const ComplexVec& z,
                            double tol = kFiberTol, int max_iter = 50);

struct ClosestPointOptions {
  int max_iter = 200;
  /// Stationarity tolerance on the tangential displacement, relative to
  /// max(1, current distance).
  double opt_tol = 1e-10;
  double fiber_tol = kFiberTol;
  /// Stop as soon as a fiber point within this distance is found.
  std::optional<double> stop_within;
};

struct ClosestPointResult {
  ComplexVec point;
  double distance;            // |point - target|
  double optimality_residual; // |pi_T (target - point)|
  int iterations;
};

/// Local minimization of |w - target| over w in Z by projected gradient
/// descent: move along the tangential part of (target - w), re-project onto
/// Z, and backtrack until the distance strictly decreases.
ClosestPointResult closest_point(const PolynomialMap& f,
                                 const ComplexVec& target,
                                 const ComplexVec& start,
                                 const ClosestPointOptions& opts = {});

struct DistanceEstimate {
  double distance;  // upper bound on d(0, Z)
  double optimality_residual;
  ComplexVec point;
  int failed_starts;
};

/// min |z| over fiber-constrained local minimizers reached from `starts`.
/// Throws a projection error when every start fails.
DistanceEstimate distance_to_origin(const PolynomialMap& f,
                                    std::span<const ComplexVec> starts);

/// base_point followed by count-1 unit-scale Gaussian perturbations of it.
std::vector<ComplexVec> default_distance_starts(const PolynomialMap& f,
                                                std::uint64_t seed,
                                                int count = 16);

}  // namespace eldan
