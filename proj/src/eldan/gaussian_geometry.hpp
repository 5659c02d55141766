// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// Closed-form Gaussian measures of discs and affine tubes, expectations under
// complex Gaussians, the tilted-disc inequality check, and the geometry of
// diagonal circled norms.

#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eldan/complex_gaussian.hpp"
#include "eldan/linalg.hpp"

namespace eldan {

/// P(N >= m) for N ~ Poisson(y); equals the regularized lower incomplete
/// gamma function P(m, y) and the chi-square CDF with 2m degrees of freedom
/// at 2y.
double poisson_upper_tail(int m, double y);

/// CDF at x of the noncentral chi-square law with 2*half_dof degrees of
/// freedom and noncentrality lambda, as a Poisson(lambda/2) mixture of
/// central laws. The neglected Poisson mass is below 1e-14.
double noncentral_chi2_cdf_even(int half_dof, double lambda, double x);

struct DiscSpec {
  int k = 1;            // complex dimension
  double center_norm;   // |v|
  double radius;        // R
};

/// gamma_k(D(v, R)) for the standard Gaussian on C^k = R^{2k}.
double disc_measure(const DiscSpec& spec);
inline double disc_measure(int k, double center_norm, double radius) {
  return disc_measure(DiscSpec{k, center_norm, radius});
}

/// gamma_n of the r-tube around an (n-k)-dimensional complex affine subspace
/// at distance d from the origin. Depends on n only through validation.
double affine_tube_measure(int n, int k, double d, double r);

namespace functional {
struct One {};
struct SquaredNorm {};
/// Indicator of Re(u* z) > c.
struct HalfSpace {
  ComplexVec u;
  double c = 0.0;
};
/// min(exp(Re(u* z)), cap)
struct BoundedExp {
  ComplexVec u;
  double cap = 1.0;
};
}  // namespace functional

using TestFunctional =
    std::variant<functional::One, functional::SquaredNorm,
                 functional::HalfSpace, functional::BoundedExp>;

std::string functional_tag(const TestFunctional& phi);

/// Integral of phi against mu in closed form.
double gaussian_expectation(const ComplexGaussian& mu,
                            const TestFunctional& phi);

struct TiltCheck {
  double lhs;
  double rhs;
  bool holds;
};

/// For mu centered at 0 with density proportional to exp(-z* B z / 2) on C^k
/// (k <= 2, B >= Id), compares
///   lhs = int_{D(0,R)} exp(Re(v* z)) dmu
///   rhs = gamma_k(D(v,R)) * int exp(Re(v* z)) dmu
/// with every integral computed by quadrature. holds = lhs >= rhs - 1e-6.
TiltCheck tilt_inequality_check(const HermitianMatrix& b, const ComplexVec& v,
                                double radius);

struct CircledNormSpec {
  std::vector<double> weights;  // K = {z : |diag(w) z| <= 1}
};

struct CircledGeometry {
  double r_k;          // inradius: min |z| over the boundary of K
  ComplexVec z0;       // boundary point with |z0| = r_k
  SubspaceBasis h;     // z0^perp, dimension n-1
};

void validate(const CircledNormSpec& spec);
double circled_norm(const CircledNormSpec& spec, const ComplexVec& z);
CircledGeometry circled_norm_geometry(const CircledNormSpec& spec);

}  // namespace eldan
