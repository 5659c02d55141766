// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/localization.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace eldan {

QuadraticPotential::QuadraticPotential(ComplexVec center,
                                       HermitianMatrix matrix)
    : center_(std::move(center)), matrix_(std::move(matrix)) {
  if (center_.size() != matrix_.dim())
    fail(ErrorKind::validation, "potential center and matrix sizes differ");
  auto e = hermitian_eig(matrix_);
  if (e.values.size() == 0 || !(e.values(0) >= 1e-12))
    fail(ErrorKind::domain, "potential matrix is not positive-definite");
  log_det_ = e.values.array().log().sum();
}

double QuadraticPotential::operator()(const ComplexVec& z) const {
  if (z.size() != center_.size())
    fail(ErrorKind::validation, "point dimension does not match potential");
  ComplexVec d = z - center_;
  return 0.5 * d.dot(matrix_.matrix() * d).real() - log_det_;
}

QuadraticPotential standard_potential(int n) {
  if (n < 1) fail(ErrorKind::validation, "dimension must be >= 1");
  return {ComplexVec::Zero(n), HermitianMatrix::identity(n)};
}

double potential_eval(const QuadraticPotential& p, const ComplexVec& z) {
  return p(z);
}

LocalizationState LocalizationState::initial(const PolynomialMap& f,
                                             StreamId stream) {
  LocalizationState s;
  s.a = f.base_point();
  s.b = HermitianMatrix::identity(f.n());
  s.sigma_accum =
      HermitianMatrix::symmetrized(ComplexMat::Zero(f.n(), f.n()));
  s.k = f.k();
  s.stream = stream;
  return s;
}

Diffusion diffusion_of_state(const LocalizationState& state,
                             const PolynomialMap& f, double fiber_tol) {
  const int n = f.n();
  if (state.a.size() != n || state.b.dim() != n)
    fail(ErrorKind::state, "state dimension does not match the map");
  double res = f.eval(state.a).norm();
  if (!(res <= fiber_tol)) {
    std::ostringstream msg;
    msg << "center is off the fiber (|f(a)| = " << res << ")";
    fail(ErrorKind::state, msg.str());
  }
  RootPair roots = pd_roots(state.b);
  SubspaceBasis normal = gradient_subspace(f, state.a);
  // B^{-1/2} is invertible, so the rotated gradients stay independent.
  SubspaceBasis rotated = SubspaceBasis::orthonormalize(
      roots.inv_sqrt.matrix() * normal.columns(), 1e-300);
  HermitianMatrix pi = proj_with_kernel(rotated);
  ComplexMat sigma =
      roots.inv_sqrt.matrix() * pi.matrix() / std::sqrt(static_cast<double>(n));
  return {std::move(sigma), std::move(pi), std::move(roots)};
}

ComplexMat sigma_of_state(const LocalizationState& state,
                          const PolynomialMap& f) {
  return diffusion_of_state(state, f).sigma;
}

ComplexVec brownian_increment(CounterRng& rng, double h, int n) {
  if (!(h >= 0.0)) fail(ErrorKind::validation, "step size must be >= 0");
  ComplexVec dw(n);
  if (h == 0.0) return ComplexVec::Zero(n);
  for (int j = 0; j < n; ++j) dw(j) = rng.complex_normal(h);
  return dw;
}

LocalizationState step(const LocalizationState& state, const PolynomialMap& f,
                       double h, const ComplexVec& dw) {
  if (!(h > 0.0)) fail(ErrorKind::validation, "step size must be > 0");
  const int n = f.n();
  if (dw.size() != n)
    fail(ErrorKind::validation, "Brownian increment has wrong dimension");
  Diffusion d = diffusion_of_state(state, f);

  LocalizationState next = state;
  ComplexVec moved = state.a + d.sigma * dw;
  next.last_fiber_residual = f.eval(moved).norm();
  FiberPoint fp = project_to_fiber(f, moved);
  next.a = std::move(fp.point);
  next.last_post_residual = fp.residual;
  next.fiber_residual_max =
      std::max(state.fiber_residual_max, next.last_fiber_residual);

  // B Sigma Sigma* B = B^{1/2} pi B^{1/2} / n, a PSD increment.
  const ComplexMat& root = d.roots.sqrt.matrix();
  const ComplexMat& inv_root = d.roots.inv_sqrt.matrix();
  const double rate = h / static_cast<double>(n);
  next.b = HermitianMatrix::symmetrized(
      state.b.matrix() + rate * (root * d.pi.matrix() * root));
  next.sigma_accum = HermitianMatrix::symmetrized(
      state.sigma_accum.matrix() +
      rate * (inv_root * d.pi.matrix() * inv_root));
  next.t = state.t + h;
  return next;
}

DiagnosticRow diagnostics_of(const LocalizationState& state) {
  auto e = hermitian_eig(state.b);
  const auto n = e.values.size();
  ComplexMat b_inv = e.vectors * e.values.cwiseInverse().cast<Complex>().asDiagonal() *
                     e.vectors.adjoint();
  ComplexMat gap = state.sigma_accum.matrix() -
                   (ComplexMat::Identity(n, n) - b_inv);
  double lambda_k1 = state.k < n ? e.values(state.k)
                                 : std::numeric_limits<double>::quiet_NaN();
  return {state.t,        state.last_fiber_residual,
          state.last_post_residual,
          e.values(0),    lambda_k1,
          e.values.sum(), hs_norm(gap)};
}

std::int64_t step_count(double horizon, double h) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    fail(ErrorKind::validation, "horizon T must be > 0");
  if (!(h > 0.0) || !std::isfinite(h))
    fail(ErrorKind::validation, "step size h must be > 0");
  double ratio = horizon / h;
  if (ratio > 1e10) fail(ErrorKind::validation, "too many steps");
  return std::max<std::int64_t>(1, std::llround(ratio));
}

PathResult run_path(const PolynomialMap& f, const PathOptions& opts,
                    StreamId stream) {
  CounterRng rng(stream);
  const int n = f.n();
  return run_path(f, opts, stream, [&rng, n](std::int64_t, double h) {
    return brownian_increment(rng, h, n);
  });
}

PathResult run_path(const PolynomialMap& f, const PathOptions& opts,
                    StreamId stream, const IncrementSource& increments) {
  const std::int64_t steps = step_count(opts.horizon, opts.h);
  const double h = opts.horizon / static_cast<double>(steps);
  if (opts.record_stride < 1)
    fail(ErrorKind::validation, "record_stride must be >= 1");
  const int stride = opts.record_stride;

  PathResult out{LocalizationState::initial(f, stream), {}};
  out.rows.reserve(static_cast<std::size_t>(steps / stride + 2));
  out.rows.push_back(diagnostics_of(out.state));
  for (std::int64_t i = 0; i < steps; ++i) {
    try {
      ComplexVec dw = increments(i, h);
      out.state = step(out.state, f, h, dw);
    } catch (const Error& e) {
      throw PathAbort(e, std::move(out));
    }
    out.state.t = static_cast<double>(i + 1) * h;
    if ((i + 1) % stride == 0 || i + 1 == steps)
      out.rows.push_back(diagnostics_of(out.state));
  }
  return out;
}

double collapsing_covariance_eigenvalue(const LocalizationState& state) {
  auto e = hermitian_eig(state.b);
  if (state.k >= e.values.size()) return 0.0;
  return 2.0 / e.values(state.k);
}

ComplexGaussian terminal_gaussian(const LocalizationState& state,
                                  double rank_tol) {
  auto e = hermitian_eig(state.b);
  const auto n = e.values.size();
  if (n == 0 || !(e.values(0) > 0.0))
    fail(ErrorKind::state, "B is not positive-definite");
  RealVec cov_eigs = 2.0 * e.values.cwiseInverse();
  for (Eigen::Index i = 0; i < n; ++i)
    if (cov_eigs(i) < rank_tol) cov_eigs(i) = 0.0;

  if (state.k < n && state.t > 0.0) {
    const double lam = 2.0 / e.values(state.k);
    const double bound = 2.0 * static_cast<double>(n) * (state.k + 1) / state.t;
    if (!(lam <= bound * (1.0 + 1e-12))) {
      std::ostringstream msg;
      msg << "eigenvalue collapse bound violated: " << lam << " > " << bound;
      fail(ErrorKind::invariant, msg.str());
    }
  }
  ComplexMat cov =
      e.vectors * cov_eigs.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  int support = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (cov_eigs(i) > 0.0) ++support;
  return {state.a, HermitianMatrix::symmetrized(cov), support};
}

}  // namespace eldan
