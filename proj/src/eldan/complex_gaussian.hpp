// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>

#include "eldan/error.hpp"
#include "eldan/linalg.hpp"

namespace eldan {

/// Complex Gaussian on C^n given by its center and complex covariance
/// A^{jk} = E[(z^j - a^j) conj(z^k - a^k)]. The covariance may be singular;
/// the measure then lives on an affine subspace of dimension support_dim.
/// The standard Gaussian has A = 2 Id.
struct ComplexGaussian {
  ComplexVec center;
  HermitianMatrix covariance;
  int support_dim = 0;

  static ComplexGaussian standard(int n) {
    return make(ComplexVec::Zero(n),
                HermitianMatrix::symmetrized(2.0 * ComplexMat::Identity(n, n)),
                0.0);
  }

  /// Validates PSD and counts eigenvalues above rank_tol.
  static ComplexGaussian make(ComplexVec center, HermitianMatrix covariance,
                              double rank_tol) {
    if (center.size() != covariance.dim())
      fail(ErrorKind::validation, "center and covariance dimensions differ");
    auto e = hermitian_eig(covariance);
    double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
    if (e.values.size() && e.values(0) < -kPsdTol * scale)
      fail(ErrorKind::domain, "covariance is not positive semi-definite");
    int support = 0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
      if (e.values(i) > rank_tol) ++support;
    return {std::move(center), std::move(covariance), support};
  }
};

}  // namespace eldan
