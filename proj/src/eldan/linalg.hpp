// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// Dense complex Hermitian linear algebra for the small (n <= 16) matrices the
// localization process works with.

#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace eldan {

using Complex = std::complex<double>;
using ComplexVec = Eigen::VectorXcd;
using ComplexMat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;

/// Relative tolerance for accepting a matrix as Hermitian.
inline constexpr double kHermitianTol = 1e-12;
/// Eigenvalues above -kPsdTol are treated as zero by the PSD routines.
inline constexpr double kPsdTol = 1e-10;
/// Tolerance on Q*Q = Id for orthonormal bases.
inline constexpr double kOrthonormalTol = 1e-12;

/// Complex Hermitian matrix. Construction from a raw matrix validates
/// Hermitian symmetry and then stores the exact symmetrization (A + A*)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMat& m);

  /// Symmetrizes without validation; for products that are Hermitian by
  /// construction and only carry rounding drift.
  static HermitianMatrix symmetrized(const ComplexMat& m);
  static HermitianMatrix identity(int n);
  static HermitianMatrix diagonal(std::span<const double> d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMat& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }
  double trace() const { return m_.trace().real(); }

 private:
  struct Unchecked {};
  HermitianMatrix(const ComplexMat& m, Unchecked);
  ComplexMat m_;
};

/// Orthonormal basis (as columns) of a complex subspace of C^n.
class SubspaceBasis {
 public:
  /// Validates Q*Q = Id to kOrthonormalTol.
  explicit SubspaceBasis(const ComplexMat& columns);

  /// Zero-dimensional subspace of C^n.
  static SubspaceBasis empty(int n);
  /// Orthonormalizes the column span of `spanning` with Householder QR.
  /// Throws a singularity error if the columns are numerically dependent,
  /// i.e. some |R_ii| < rank_tol.
  static SubspaceBasis orthonormalize(const ComplexMat& spanning,
                                      double rank_tol);

  int ambient_dim() const { return static_cast<int>(q_.rows()); }
  int dim() const { return static_cast<int>(q_.cols()); }
  const ComplexMat& columns() const { return q_; }

 private:
  struct Unchecked {};
  SubspaceBasis(ComplexMat q, Unchecked) : q_(std::move(q)) {}
  ComplexMat q_;
};

struct EigenDecomposition {
  RealVec values;      // ascending
  ComplexMat vectors;  // unitary, columns match `values`
};

EigenDecomposition hermitian_eig(const HermitianMatrix& a);
/// Validating overload for raw matrices.
EigenDecomposition hermitian_eig(const ComplexMat& a);

HermitianMatrix psd_sqrt(const HermitianMatrix& a);
HermitianMatrix psd_inv_sqrt(const HermitianMatrix& a);

/// B^{1/2} and B^{-1/2} from a single decomposition.
struct RootPair {
  HermitianMatrix sqrt;
  HermitianMatrix inv_sqrt;
};
RootPair pd_roots(const HermitianMatrix& b);

/// Orthogonal projection whose kernel is the given subspace: Id - QQ*.
HermitianMatrix proj_with_kernel(const SubspaceBasis& kernel);

double log_det(const HermitianMatrix& b);

/// Hilbert-Schmidt (Frobenius) norm.
inline double hs_norm(const ComplexMat& m) { return m.norm(); }

HermitianMatrix inverse_pd(const HermitianMatrix& b);

}  // namespace eldan
