// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/gaussian_geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "eldan/error.hpp"
#include "eldan/quadrature.hpp"

namespace eldan {

namespace {

constexpr double kPoissonTailTol = 1e-14;
constexpr int kMaxSeriesTerms = 100000;

double log_poisson_pmf(int i, double y) {
  return -y + i * std::log(y) - std::lgamma(i + 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

double poisson_upper_tail(int m, double y) {
  if (m <= 0) return 1.0;
  if (!(y > 0.0)) return 0.0;
  if (std::isinf(y)) return 1.0;
  if (m > y) {
    // Terms decrease from i = m onwards.
    double term = std::exp(log_poisson_pmf(m, y));
    double sum = 0.0;
    for (int i = m; i < m + kMaxSeriesTerms; ++i) {
      sum += term;
      double ratio = y / (i + 1.0);
      if (term * ratio / (1.0 - ratio) <= 1e-17 * sum || term == 0.0) break;
      term *= ratio;
    }
    return std::min(1.0, sum);
  }
  // Complement: terms decrease from i = m-1 downwards.
  double term = std::exp(log_poisson_pmf(m - 1, y));
  double sum = 0.0;
  for (int i = m - 1; i >= 0; --i) {
    sum += term;
    if (term <= 1e-17 * sum || term == 0.0) {
      // remaining terms shrink at least geometrically with ratio i/y < 1
      if (i < y * 0.9) break;
    }
    term *= i / y;
  }
  return std::max(0.0, 1.0 - sum);
}

double noncentral_chi2_cdf_even(int half_dof, double lambda, double x) {
  if (half_dof < 1) fail(ErrorKind::validation, "degrees of freedom must be >= 2");
  if (!(lambda >= 0.0)) fail(ErrorKind::validation, "noncentrality must be >= 0");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double y = 0.5 * x;
  const double mu = 0.5 * lambda;
  if (mu == 0.0) return poisson_upper_tail(half_dof, y);

  // Sum outward from the Poisson mode so large noncentralities do not
  // underflow the leading weight.
  const int mode = static_cast<int>(std::floor(mu));
  double sum = 0.0;
  int terms = 0;
  const double w_mode = std::exp(log_poisson_pmf(mode, mu));

  double w = w_mode;
  for (int j = mode; terms < kMaxSeriesTerms; ++j, ++terms) {
    sum += w * poisson_upper_tail(half_dof + j, y);
    double ratio = mu / (j + 1.0);
    if (ratio < 1.0 && w * ratio / (1.0 - ratio) < kPoissonTailTol) break;
    w *= ratio;
  }
  w = w_mode;
  for (int j = mode - 1; j >= 0 && terms < kMaxSeriesTerms; --j, ++terms) {
    w *= (j + 1.0) / mu;
    sum += w * poisson_upper_tail(half_dof + j, y);
    double ratio = j / mu;
    if (w * ratio / (1.0 - ratio) < kPoissonTailTol) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double disc_measure(const DiscSpec& spec) {
  if (spec.k < 1) fail(ErrorKind::validation, "disc dimension must be >= 1");
  if (!(spec.center_norm >= 0.0) || !(spec.radius >= 0.0) ||
      std::isnan(spec.center_norm))
    fail(ErrorKind::validation, "disc center norm and radius must be >= 0");
  if (spec.radius == 0.0) return 0.0;
  if (std::isinf(spec.radius)) return 1.0;
  if (std::isinf(spec.center_norm)) return 0.0;
  if (spec.center_norm == 0.0) {
    // 1 - e^{-y} sum_{j<k} y^j / j!
    const double y = 0.5 * spec.radius * spec.radius;
    double term = 1.0, partial = 0.0;
    for (int j = 0; j < spec.k; ++j) {
      partial += term;
      term *= y / (j + 1.0);
    }
    return std::clamp(1.0 - std::exp(-y) * partial, 0.0, 1.0);
  }
  return noncentral_chi2_cdf_even(spec.k, spec.center_norm * spec.center_norm,
                                  spec.radius * spec.radius);
}

double affine_tube_measure(int n, int k, double d, double r) {
  if (k < 1 || k > n)
    fail(ErrorKind::validation, "tube codimension must satisfy 1 <= k <= n");
  return disc_measure(k, d, r);
}

std::string functional_tag(const TestFunctional& phi) {
  struct Tagger {
    std::string operator()(const functional::One&) const { return "one"; }
    std::string operator()(const functional::SquaredNorm&) const {
      return "squared_norm";
    }
    std::string operator()(const functional::HalfSpace&) const {
      return "halfspace";
    }
    std::string operator()(const functional::BoundedExp&) const {
      return "bounded_exp";
    }
  };
  return std::visit(Tagger{}, phi);
}

double gaussian_expectation(const ComplexGaussian& mu,
                            const TestFunctional& phi) {
  const auto n = mu.center.size();
  // Re(u* z) is real Gaussian with mean Re(u* a) and variance u* A u / 2.
  auto marginal = [&](const ComplexVec& u) {
    if (u.size() != n)
      fail(ErrorKind::validation, "functional direction has wrong dimension");
    double mean = u.dot(mu.center).real();
    double var = 0.5 * u.dot(mu.covariance.matrix() * u).real();
    return std::pair{mean, std::max(0.0, var)};
  };
  struct Visitor {
    const ComplexGaussian& mu;
    decltype(marginal)& marg;
    double operator()(const functional::One&) const { return 1.0; }
    double operator()(const functional::SquaredNorm&) const {
      return mu.center.squaredNorm() + mu.covariance.trace();
    }
    double operator()(const functional::HalfSpace& hs) const {
      auto [m, var] = marg(hs.u);
      if (var <= 0.0) return m > hs.c ? 1.0 : 0.0;
      return normal_cdf((m - hs.c) / std::sqrt(var));
    }
    double operator()(const functional::BoundedExp& be) const {
      if (!(be.cap > 0.0))
        fail(ErrorKind::validation, "bounded_exp cap must be > 0");
      auto [m, var] = marg(be.u);
      if (var <= 0.0) return std::min(std::exp(m), be.cap);
      const double s = std::sqrt(var);
      const double level = std::log(be.cap);
      // E[e^X; X < L] + cap * P(X >= L)
      double below = std::exp(m + 0.5 * var) * normal_cdf((level - m - var) / s);
      double above = be.cap * normal_cdf((m - level) / s);
      return below + above;
    }
  };
  return std::visit(Visitor{mu, marginal}, phi);
}

TiltCheck tilt_inequality_check(const HermitianMatrix& b, const ComplexVec& v,
                                double radius) {
  const int k = b.dim();
  if (k > 2 || k < 1)
    fail(ErrorKind::unsupported, "tilt check supports k = 1, 2 only");
  if (v.size() != k) fail(ErrorKind::validation, "v has wrong dimension");
  if (!(radius >= 0.0)) fail(ErrorKind::validation, "radius must be >= 0");
  auto e = hermitian_eig(b);
  if (!(e.values(0) >= 1.0 - 1e-10))
    fail(ErrorKind::validation, "B must dominate the identity");

  const double det = e.values.prod();
  const double norm = det / std::pow(2.0 * std::numbers::pi, k);
  const ComplexMat& bm = b.matrix();
  auto tilted = [&](const ComplexVec& z) {
    double quad = z.dot(bm * z).real();
    return norm * std::exp(v.dot(z).real() - 0.5 * quad);
  };
  auto standard = [&](const ComplexVec& z) {
    return std::exp(-0.5 * z.squaredNorm()) / std::pow(2.0 * std::numbers::pi, k);
  };

  BallQuadratureOptions opts;
  if (k == 2) opts = {48, 32, 64};
  // The tilted measure is Gaussian around B^{-1} v with real coordinate
  // variances <= 1; 12 further units make its tail negligible.
  ComplexVec shift = b.matrix().ldlt().solve(v);
  const double big = shift.norm() + 12.0;
  const ComplexVec origin = ComplexVec::Zero(k);

  double lhs = integrate_ball(tilted, origin, radius, opts);
  double total = integrate_ball(tilted, origin, big, opts);
  double disc = integrate_ball(standard, v, radius, opts);
  double rhs = disc * total;
  return {lhs, rhs, lhs >= rhs - 1e-6};
}

void validate(const CircledNormSpec& spec) {
  if (spec.weights.empty())
    fail(ErrorKind::validation, "circled norm needs at least one weight");
  for (double w : spec.weights)
    if (!(w > 0.0) || !std::isfinite(w))
      fail(ErrorKind::validation, "circled norm weights must be positive");
}

double circled_norm(const CircledNormSpec& spec, const ComplexVec& z) {
  if (z.size() != static_cast<Eigen::Index>(spec.weights.size()))
    fail(ErrorKind::validation, "point dimension does not match weights");
  double s = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j)
    s += std::norm(spec.weights[static_cast<std::size_t>(j)] * z(j));
  return std::sqrt(s);
}

CircledGeometry circled_norm_geometry(const CircledNormSpec& spec) {
  validate(spec);
  const int n = static_cast<int>(spec.weights.size());
  int best = 0;
  for (int j = 1; j < n; ++j)
    if (spec.weights[static_cast<std::size_t>(j)] >
        spec.weights[static_cast<std::size_t>(best)])
      best = j;
  const double wmax = spec.weights[static_cast<std::size_t>(best)];
  ComplexVec z0 = ComplexVec::Zero(n);
  z0(best) = 1.0 / wmax;
  ComplexMat h(n, n - 1);
  h.setZero();
  for (int j = 0, col = 0; j < n; ++j)
    if (j != best) h(j, col++) = 1.0;
  return {1.0 / wmax, std::move(z0), SubspaceBasis(h)};
}

}  // namespace eldan
