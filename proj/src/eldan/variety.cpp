// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/variety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eldan/error.hpp"
#include "eldan/rng.hpp"

namespace eldan {

namespace {

using Svd = Eigen::JacobiSVD<ComplexMat>;

// Thin SVD of the Jacobian with the full-rank check applied.
Svd checked_svd(const ComplexMat& jac, double rank_tol) {
  Svd svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  double smin = s.size() ? s(s.size() - 1) : 0.0;
  if (s.size() < jac.rows() || !(smin >= rank_tol)) {
    std::ostringstream msg;
    msg << "Jacobian is rank-deficient (smallest singular value " << smin
        << " < " << rank_tol << ")";
    fail(ErrorKind::singularity, msg.str());
  }
  return svd;
}

// Component of v orthogonal to the range of J*: the complex tangent space of
// the fiber.
ComplexVec tangential(const Svd& svd, const ComplexVec& v) {
  const ComplexMat& q = svd.matrixV();
  return v - q * (q.adjoint() * v);
}

}  // namespace

PolynomialMap::PolynomialMap(int n, std::vector<Component> components,
                             ComplexVec base_point)
    : n_(n), components_(std::move(components)),
      base_point_(std::move(base_point)) {
  if (n_ < 1) fail(ErrorKind::validation, "ambient dimension n must be >= 1");
  const int k = this->k();
  if (k < 1 || k > n_)
    fail(ErrorKind::validation, "codomain dimension must satisfy 1 <= k <= n");
  for (std::size_t j = 0; j < components_.size(); ++j) {
    for (std::size_t m = 0; m < components_[j].size(); ++m) {
      const auto& mono = components_[j][m];
      std::string where = "/components/" + std::to_string(j) + "/" +
                          std::to_string(m) + "/exps";
      if (static_cast<int>(mono.exps.size()) != n_)
        fail(ErrorKind::validation,
             "exponent vector has length " + std::to_string(mono.exps.size()) +
                 ", expected " + std::to_string(n_),
             where);
      for (int e : mono.exps) {
        if (e < 0)
          fail(ErrorKind::validation, "negative exponent", where);
        max_degree_ = std::max(max_degree_, e);
      }
    }
  }
  if (base_point_.size() != n_)
    fail(ErrorKind::validation, "base_point has wrong length", "/base_point");
  double res = eval(base_point_).norm();
  if (!(res <= 1e-12)) {
    std::ostringstream msg;
    msg << "base_point is not on the fiber (|f| = " << res << ")";
    fail(ErrorKind::validation, msg.str(), "/base_point");
  }
  try {
    checked_svd(jacobian(base_point_), kRankTol);
  } catch (const Error& e) {
    fail(ErrorKind::validation,
         std::string("Jacobian at base_point: ") + e.what(), "/base_point");
  }
}

void PolynomialMap::check_dim(const ComplexVec& z) const {
  if (z.size() != n_)
    fail(ErrorKind::validation, "point has dimension " +
                                    std::to_string(z.size()) + ", expected " +
                                    std::to_string(n_));
}

void PolynomialMap::eval_with_jacobian(const ComplexVec& z, ComplexVec& value,
                                       ComplexMat& jac) const {
  check_dim(z);
  const int k = this->k();
  // powers(l, e) = z_l^e
  ComplexMat powers(n_, max_degree_ + 1);
  for (int l = 0; l < n_; ++l) {
    powers(l, 0) = 1.0;
    for (int e = 1; e <= max_degree_; ++e)
      powers(l, e) = powers(l, e - 1) * z(l);
  }
  value = ComplexVec::Zero(k);
  jac = ComplexMat::Zero(k, n_);
  for (int j = 0; j < k; ++j) {
    for (const auto& mono : components_[static_cast<std::size_t>(j)]) {
      Complex term = mono.coeff;
      for (int l = 0; l < n_; ++l) term *= powers(l, mono.exps[l]);
      value(j) += term;
      for (int l = 0; l < n_; ++l) {
        const int e = mono.exps[l];
        if (e == 0) continue;
        Complex d = mono.coeff * static_cast<double>(e) * powers(l, e - 1);
        for (int m = 0; m < n_; ++m)
          if (m != l) d *= powers(m, mono.exps[m]);
        jac(j, l) += d;
      }
    }
  }
}

ComplexVec PolynomialMap::eval(const ComplexVec& z) const {
  check_dim(z);
  ComplexVec value = ComplexVec::Zero(k());
  for (int j = 0; j < k(); ++j) {
    for (const auto& mono : components_[static_cast<std::size_t>(j)]) {
      Complex term = mono.coeff;
      for (int l = 0; l < n_; ++l)
        for (int e = 0; e < mono.exps[l]; ++e) term *= z(l);
      value(j) += term;
    }
  }
  return value;
}

ComplexMat PolynomialMap::jacobian(const ComplexVec& z) const {
  ComplexVec value;
  ComplexMat jac;
  eval_with_jacobian(z, value, jac);
  return jac;
}

PolynomialMap PolynomialMap::with_coordinate_scaling(
    std::span<const double> weights) const {
  if (static_cast<int>(weights.size()) != n_)
    fail(ErrorKind::validation, "weights must have length n");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      fail(ErrorKind::validation, "weights must be positive and finite");
  std::vector<Component> scaled = components_;
  for (auto& comp : scaled) {
    for (auto& mono : comp) {
      for (int l = 0; l < n_; ++l)
        mono.coeff /= std::pow(weights[static_cast<std::size_t>(l)],
                               mono.exps[l]);
    }
  }
  ComplexVec base = base_point_;
  for (int l = 0; l < n_; ++l) base(l) *= weights[static_cast<std::size_t>(l)];
  return PolynomialMap(n_, std::move(scaled), std::move(base));
}

ComplexVec eval_map(const PolynomialMap& f, const ComplexVec& z) {
  return f.eval(z);
}

ComplexMat eval_jacobian(const PolynomialMap& f, const ComplexVec& z) {
  return f.jacobian(z);
}

SubspaceBasis gradient_subspace(const PolynomialMap& f, const ComplexVec& z,
                                double rank_tol) {
  Svd svd = checked_svd(f.jacobian(z), rank_tol);
  return SubspaceBasis(svd.matrixV());
}

FiberPoint project_to_fiber(const PolynomialMap& f, const ComplexVec& z,
                            double tol, int max_iter) {
  ComplexVec w = z;
  ComplexVec value;
  ComplexMat jac;
  f.eval_with_jacobian(w, value, jac);
  double res = value.norm();
  if (res == 0.0) {
    // Exactly on Z, but a singular point is still outside the smooth part.
    checked_svd(jac, kRankTol);
    return {w, 0.0};
  }

  bool polishing = res <= tol;
  for (int iter = 0; iter < max_iter; ++iter) {
    Svd svd = checked_svd(jac, kRankTol);
    ComplexVec step = svd.solve(value);
    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, alpha *= 0.5) {
      ComplexVec cand = w - alpha * step;
      double cand_res = f.eval(cand).norm();
      if (cand_res < res) {
        w = std::move(cand);
        res = cand_res;
        accepted = true;
        break;
      }
      if (polishing) break;
    }
    if (polishing || res == 0.0) return {w, res};
    if (!accepted) break;
    f.eval_with_jacobian(w, value, jac);
    if (res <= tol) polishing = true;
  }
  if (res <= tol) return {w, res};
  std::ostringstream msg;
  msg << "Gauss-Newton projection did not converge (residual " << res
      << " after " << max_iter << " iterations)";
  fail(ErrorKind::projection, msg.str());
}

ClosestPointResult closest_point(const PolynomialMap& f,
                                 const ComplexVec& target,
                                 const ComplexVec& start,
                                 const ClosestPointOptions& opts) {
  FiberPoint fp = project_to_fiber(f, start, opts.fiber_tol);
  ComplexVec w = std::move(fp.point);
  double dist = (w - target).norm();
  double opt_res = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    if (opts.stop_within && dist <= *opts.stop_within) break;
    Svd svd = checked_svd(f.jacobian(w), kRankTol);
    ComplexVec g = tangential(svd, target - w);
    opt_res = g.norm();
    if (opt_res <= opts.opt_tol * std::max(1.0, dist)) break;
    double alpha = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 30; ++halving, alpha *= 0.5) {
      ComplexVec cand;
      try {
        cand = project_to_fiber(f, w + alpha * g, opts.fiber_tol).point;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::projection &&
            e.kind() != ErrorKind::singularity)
          throw;
        continue;
      }
      double cand_dist = (cand - target).norm();
      if (cand_dist < dist) {
        w = std::move(cand);
        dist = cand_dist;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (iter == opts.max_iter || (opts.stop_within && dist <= *opts.stop_within)) {
    Svd svd = checked_svd(f.jacobian(w), kRankTol);
    opt_res = tangential(svd, target - w).norm();
  }
  return {std::move(w), dist, opt_res, iter};
}

DistanceEstimate distance_to_origin(const PolynomialMap& f,
                                    std::span<const ComplexVec> starts) {
  const ComplexVec origin = ComplexVec::Zero(f.n());
  std::optional<DistanceEstimate> best;
  int failed = 0;
  for (const auto& s : starts) {
    try {
      auto r = closest_point(f, origin, s);
      if (!best || r.distance < best->distance)
        best = DistanceEstimate{r.distance, r.optimality_residual, r.point, 0};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::projection &&
          e.kind() != ErrorKind::singularity)
        throw;
      ++failed;
    }
  }
  if (!best)
    fail(ErrorKind::projection, "no start could be projected onto the fiber");
  best->failed_starts = failed;
  return *best;
}

std::vector<ComplexVec> default_distance_starts(const PolynomialMap& f,
                                                std::uint64_t seed,
                                                int count) {
  std::vector<ComplexVec> starts;
  if (count < 1) return starts;
  starts.push_back(f.base_point());
  CounterRng rng(StreamId::of(seed, StreamPurpose::distance_start, 0));
  for (int i = 1; i < count; ++i)
    starts.push_back(f.base_point() + standard_complex_gaussian(rng, f.n()));
  return starts;
}

}  // namespace eldan
