// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "eldan/linalg.hpp"

namespace eldan {

struct GaussLegendreRule {
  std::vector<double> nodes;    // in (-1, 1)
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule on [-1, 1]. Rules are cached per size.
const GaussLegendreRule& gauss_legendre(int m);

struct BallQuadratureOptions {
  int radial_nodes = 96;
  int polar_nodes = 48;     // Hopf latitude, k = 2 only
  int angular_nodes = 128;  // per circle, periodic trapezoid
};

/// Integral of g over the closed Euclidean ball {|z - center| <= radius} in
/// C^k, k in {1, 2}, against Lebesgue measure. Polar coordinates about the
/// center make the integrand smooth, so Gauss-Legendre in the radius and the
/// periodic trapezoid rule in the angles converge spectrally.
double integrate_ball(const std::function<double(const ComplexVec&)>& g,
                      const ComplexVec& center, double radius,
                      const BallQuadratureOptions& opts = {});

}  // namespace eldan
