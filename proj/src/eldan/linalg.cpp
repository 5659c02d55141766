// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "eldan/error.hpp"

namespace eldan {

namespace {

ComplexMat hermitian_part(const ComplexMat& m) {
  return (m + m.adjoint()) * 0.5;
}

void require_square(const ComplexMat& m) {
  if (m.rows() != m.cols())
    fail(ErrorKind::validation, "matrix is not square");
}

// Rebuilds U f(diag) U* from an eigendecomposition.
HermitianMatrix apply_spectral(const EigenDecomposition& e, const RealVec& f) {
  ComplexMat out = e.vectors * f.cast<Complex>().asDiagonal() *
                   e.vectors.adjoint();
  return HermitianMatrix::symmetrized(out);
}

}  // namespace

HermitianMatrix::HermitianMatrix(const ComplexMat& m) {
  require_square(m);
  double scale = std::max(1.0, m.norm());
  double asym = (m - m.adjoint()).norm();
  if (!(asym <= kHermitianTol * scale)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian (|A - A*| = " << asym << ")";
    fail(ErrorKind::validation, msg.str());
  }
  m_ = hermitian_part(m);
}

HermitianMatrix::HermitianMatrix(const ComplexMat& m, Unchecked)
    : m_(hermitian_part(m)) {}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMat& m) {
  require_square(m);
  return HermitianMatrix(m, Unchecked{});
}

HermitianMatrix HermitianMatrix::identity(int n) {
  return HermitianMatrix(ComplexMat::Identity(n, n), Unchecked{});
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
  ComplexMat m = ComplexMat::Zero(static_cast<Eigen::Index>(d.size()),
                                  static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i)
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  return HermitianMatrix(m, Unchecked{});
}

SubspaceBasis::SubspaceBasis(const ComplexMat& columns) : q_(columns) {
  if (q_.cols() > q_.rows())
    fail(ErrorKind::validation, "subspace basis has more columns than rows");
  if (q_.cols() == 0) return;
  ComplexMat gram = q_.adjoint() * q_;
  double err =
      (gram - ComplexMat::Identity(q_.cols(), q_.cols())).cwiseAbs().maxCoeff();
  if (!(err <= kOrthonormalTol)) {
    std::ostringstream msg;
    msg << "basis is not orthonormal (max |Q*Q - Id| = " << err << ")";
    fail(ErrorKind::validation, msg.str());
  }
}

SubspaceBasis SubspaceBasis::empty(int n) {
  return SubspaceBasis(ComplexMat(n, 0), Unchecked{});
}

SubspaceBasis SubspaceBasis::orthonormalize(const ComplexMat& spanning,
                                            double rank_tol) {
  const auto n = spanning.rows();
  const auto d = spanning.cols();
  if (d > n)
    fail(ErrorKind::validation, "more spanning vectors than the dimension");
  if (d == 0) return empty(static_cast<int>(n));
  Eigen::HouseholderQR<ComplexMat> qr(spanning);
  const ComplexMat& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(std::abs(r(i, i)) >= rank_tol)) {
      fail(ErrorKind::singularity,
           "spanning vectors are numerically dependent");
    }
  }
  ComplexMat q = qr.householderQ() * ComplexMat::Identity(n, d);
  return SubspaceBasis(std::move(q), Unchecked{});
}

EigenDecomposition hermitian_eig(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMat> solver(a.matrix());
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::domain, "Hermitian eigensolver did not converge");
  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  const auto n = out.values.size();
  if (std::is_sorted(out.values.data(), out.values.data() + n)) return out;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) {
    return out.values(i) < out.values(j);
  });
  EigenDecomposition sorted{RealVec(n), ComplexMat(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    sorted.values(i) = out.values(src);
    sorted.vectors.col(i) = out.vectors.col(src);
  }
  return sorted;
}

EigenDecomposition hermitian_eig(const ComplexMat& a) {
  return hermitian_eig(HermitianMatrix(a));
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a) {
  auto e = hermitian_eig(a);
  double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  if (e.values.size() > 0 && e.values(0) < -kPsdTol * scale)
    fail(ErrorKind::domain, "psd_sqrt: matrix has a negative eigenvalue");
  RealVec f = e.values.cwiseMax(0.0).cwiseSqrt();
  return apply_spectral(e, f);
}

HermitianMatrix psd_inv_sqrt(const HermitianMatrix& a) {
  auto e = hermitian_eig(a);
  if (e.values.size() > 0 && !(e.values(0) > 0.0))
    fail(ErrorKind::domain, "psd_inv_sqrt: matrix is not positive-definite");
  RealVec f = e.values.cwiseSqrt().cwiseInverse();
  return apply_spectral(e, f);
}

RootPair pd_roots(const HermitianMatrix& b) {
  auto e = hermitian_eig(b);
  if (e.values.size() > 0 && !(e.values(0) > 0.0))
    fail(ErrorKind::domain, "matrix is not positive-definite");
  RealVec s = e.values.cwiseSqrt();
  return {apply_spectral(e, s), apply_spectral(e, s.cwiseInverse())};
}

HermitianMatrix inverse_pd(const HermitianMatrix& b) {
  auto e = hermitian_eig(b);
  if (e.values.size() > 0 && !(e.values(0) > 0.0))
    fail(ErrorKind::domain, "matrix is not positive-definite");
  return apply_spectral(e, e.values.cwiseInverse());
}

HermitianMatrix proj_with_kernel(const SubspaceBasis& kernel) {
  const int n = kernel.ambient_dim();
  const ComplexMat& q = kernel.columns();
  return HermitianMatrix::symmetrized(ComplexMat::Identity(n, n) -
                                      q * q.adjoint());
}

double log_det(const HermitianMatrix& b) {
  auto e = hermitian_eig(b);
  if (e.values.size() > 0 && !(e.values(0) > 0.0))
    fail(ErrorKind::domain, "log_det: matrix is not positive-definite");
  return e.values.array().log().sum();
}

}  // namespace eldan
