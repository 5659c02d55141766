// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "eldan/error.hpp"
#include "eldan/linalg.hpp"
#include "test_util.hpp"

namespace eldan {
namespace {

using testutil::random_hermitian;
using testutil::random_pd;

ComplexMat diag(std::initializer_list<double> d) {
  ComplexMat m = ComplexMat::Zero(static_cast<Eigen::Index>(d.size()),
                                  static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

TEST(HermitianMatrix, RejectsNonHermitian) {
  ComplexMat m(2, 2);
  m << 1, Complex(0, 1), Complex(0, 1), 1;
  try {
    HermitianMatrix h(m);
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
  }
}

TEST(HermitianMatrix, StoresExactSymmetrization) {
  ComplexMat m(2, 2);
  m << 1, Complex(2, 1e-14), Complex(2, -2e-14), 3;
  HermitianMatrix h(m);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
}

TEST(HermitianEig, IdentityAndDiagonal) {
  auto e = hermitian_eig(HermitianMatrix::identity(2));
  EXPECT_DOUBLE_EQ(e.values(0), 1.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);

  auto d = hermitian_eig(diag({3, 1}));
  EXPECT_DOUBLE_EQ(d.values(0), 1.0);
  EXPECT_DOUBLE_EQ(d.values(1), 3.0);
  EXPECT_NEAR(std::abs(d.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(d.vectors(0, 1)), 1.0, 1e-15);
}

TEST(HermitianEig, NonHermitianInputIsValidationError) {
  ComplexMat m(2, 2);
  m << 1, 2, 3, 4;
  EXPECT_THROW(hermitian_eig(m), Error);
}

TEST(HermitianEig, RandomReconstructionProperty) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    ComplexMat a = random_hermitian(gen, n);
    auto e = hermitian_eig(a);
    ComplexMat rec =
        e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LE((rec - a).norm(), 1e-10 * a.norm());
    EXPECT_LE((e.vectors.adjoint() * e.vectors -
               ComplexMat::Identity(n, n)).norm(), 1e-12);
    for (int i = 1; i < n; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  }
}

TEST(HermitianEig, PsdEigenvaluesNotBelowTolerance) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    ComplexMat g = testutil::random_mat(gen, 4, 2);  // rank 2
    auto e = hermitian_eig(HermitianMatrix::symmetrized(g * g.adjoint()));
    EXPECT_GE(e.values(0), -1e-12);
  }
}

TEST(PsdSqrt, Examples) {
  HermitianMatrix s = psd_sqrt(HermitianMatrix(diag({4, 9})));
  EXPECT_NEAR((s.matrix() - diag({2, 3})).norm(), 0.0, 1e-15);
  HermitianMatrix id = psd_sqrt(HermitianMatrix::identity(3));
  EXPECT_NEAR((id.matrix() - ComplexMat::Identity(3, 3)).norm(), 0.0, 1e-15);
}

TEST(PsdSqrt, NegativeEigenvalueIsDomainError) {
  try {
    psd_sqrt(HermitianMatrix(diag({1, -1e-6})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
  // Within tolerance the eigenvalue is clipped to zero.
  EXPECT_NO_THROW(psd_sqrt(HermitianMatrix(diag({1, -1e-12}))));
  EXPECT_THROW(psd_inv_sqrt(HermitianMatrix(diag({1, 0}))), Error);
}

TEST(PsdSqrt, RandomMultiplyBackProperty) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    HermitianMatrix a(random_pd(gen, n));
    HermitianMatrix s = psd_sqrt(a);
    EXPECT_LE((s.matrix() * s.matrix() - a.matrix()).norm(),
              1e-10 * a.matrix().norm());
    EXPECT_GE(hermitian_eig(s).values(0), 0.0);
    HermitianMatrix si = psd_inv_sqrt(a);
    EXPECT_LE((si.matrix() * s.matrix() - ComplexMat::Identity(n, n)).norm(),
              1e-10);
    RootPair r = pd_roots(a);
    EXPECT_LE((r.sqrt.matrix() - s.matrix()).norm(), 1e-12 * s.matrix().norm());
    EXPECT_LE((r.inv_sqrt.matrix() - si.matrix()).norm(),
              1e-12 * si.matrix().norm());
  }
}

TEST(ProjWithKernel, Examples) {
  ComplexMat e1 = ComplexMat::Zero(2, 1);
  e1(0, 0) = 1;
  HermitianMatrix p = proj_with_kernel(SubspaceBasis(e1));
  EXPECT_NEAR((p.matrix() - diag({0, 1})).norm(), 0.0, 1e-15);
  HermitianMatrix id = proj_with_kernel(SubspaceBasis::empty(3));
  EXPECT_NEAR((id.matrix() - ComplexMat::Identity(3, 3)).norm(), 0.0, 0.0);
}

TEST(ProjWithKernel, NonOrthonormalBasisIsValidationError) {
  ComplexMat q(2, 1);
  q << 1, 1;
  try {
    SubspaceBasis b(q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::validation);
  }
}

TEST(ProjWithKernel, RandomProjectionProperties) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    const int d = trial % n;
    SubspaceBasis q =
        SubspaceBasis::orthonormalize(testutil::random_mat(gen, n, d), 1e-12);
    ComplexMat p = proj_with_kernel(q).matrix();
    EXPECT_LE((p * p - p).norm(), 1e-12);
    EXPECT_LE((p - p.adjoint()).norm(), 1e-12);
    EXPECT_LE((p * q.columns()).norm(), 1e-12);
    EXPECT_NEAR(p.trace().real(), n - d, 1e-12);
    auto e = hermitian_eig(HermitianMatrix::symmetrized(p));
    int rank = 0;
    for (int i = 0; i < n; ++i) rank += e.values(i) > 0.5;
    EXPECT_EQ(rank, n - d);
  }
}

TEST(Orthonormalize, DependentColumnsAreSingular) {
  ComplexMat m(3, 2);
  m << 1, 2, 1, 2, 0, 0;
  try {
    SubspaceBasis::orthonormalize(m, 1e-8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singularity);
  }
}

TEST(LogDet, Examples) {
  EXPECT_DOUBLE_EQ(log_det(HermitianMatrix::identity(4)), 0.0);
  const double e = std::numbers::e;
  EXPECT_NEAR(log_det(HermitianMatrix(diag({e, e * e}))), 3.0, 1e-15);
  EXPECT_THROW(log_det(HermitianMatrix(diag({1, 0}))), Error);
}

TEST(LogDet, MatchesDeterminantProperty) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    ComplexMat a = random_pd(gen, 1 + trial % 5);
    // LU determinant as an independent route to det.
    double ref = std::log(a.determinant().real());
    EXPECT_NEAR(log_det(HermitianMatrix(a)), ref, 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST(InversePd, RandomProperty) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    HermitianMatrix a(random_pd(gen, n));
    EXPECT_LE((inverse_pd(a).matrix() * a.matrix() - ComplexMat::Identity(n, n)).norm(),
              1e-10);
  }
}

}  // namespace
}  // namespace eldan
