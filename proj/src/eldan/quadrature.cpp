// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "eldan/error.hpp"

namespace eldan {

namespace {

GaussLegendreRule build_rule(int m) {
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < (m + 1) / 2; ++i) {
    // Chebyshev-like initial guess, then Newton on P_m.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    auto lo = static_cast<std::size_t>(i);
    auto hi = static_cast<std::size_t>(m - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int m) {
  if (m < 1) fail(ErrorKind::validation, "quadrature size must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, build_rule(m)).first;
  return it->second;
}

double integrate_ball(const std::function<double(const ComplexVec&)>& g,
                      const ComplexVec& center, double radius,
                      const BallQuadratureOptions& opts) {
  const auto k = center.size();
  if (k != 1 && k != 2)
    fail(ErrorKind::unsupported, "ball quadrature supports k = 1, 2 only");
  if (!(radius >= 0.0)) fail(ErrorKind::validation, "radius must be >= 0");
  if (radius == 0.0) return 0.0;

  const auto& rad = gauss_legendre(opts.radial_nodes);
  const int na = opts.angular_nodes;
  const double dtheta = 2.0 * std::numbers::pi / na;
  std::vector<Complex> phase(static_cast<std::size_t>(na));
  for (int a = 0; a < na; ++a) phase[static_cast<std::size_t>(a)] = std::polar(1.0, a * dtheta);

  double total = 0.0;
  ComplexVec z(k);
  if (k == 1) {
    for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
      double rho = 0.5 * radius * (rad.nodes[i] + 1.0);
      double ring = 0.0;
      for (const auto& ph : phase) {
        z(0) = center(0) + rho * ph;
        ring += g(z);
      }
      total += rad.weights[i] * rho * ring * dtheta;
    }
    return total * 0.5 * radius;
  }

  // z = center + rho (cos(eta) e^{i xi1}, sin(eta) e^{i xi2}),
  // dV = rho^3 sin(eta) cos(eta) d rho d eta d xi1 d xi2.
  const auto& pol = gauss_legendre(opts.polar_nodes);
  const double half_pi = 0.5 * std::numbers::pi;
  for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
    double rho = 0.5 * radius * (rad.nodes[i] + 1.0);
    double shell = 0.0;
    for (std::size_t p = 0; p < pol.nodes.size(); ++p) {
      double eta = 0.5 * half_pi * (pol.nodes[p] + 1.0);
      double c = std::cos(eta), s = std::sin(eta);
      double torus = 0.0;
      for (const auto& p1 : phase) {
        z(0) = center(0) + rho * c * p1;
        for (const auto& p2 : phase) {
          z(1) = center(1) + rho * s * p2;
          torus += g(z);
        }
      }
      shell += pol.weights[p] * 0.5 * half_pi * s * c * torus * dtheta * dtheta;
    }
    total += rad.weights[i] * rho * rho * rho * shell;
  }
  return total * 0.5 * radius;
}

}  // namespace eldan
