// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

// JSON experiment configurations. Complex numbers are [re, im] pairs.
// Validation failures carry a JSON pointer to the offending value.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eldan/gaussian_geometry.hpp"
#include "eldan/variety.hpp"

namespace eldan {

using Json = nlohmann::json;

PolynomialMap map_from_json(const Json& j, const std::string& where = "");
Json map_to_json(const PolynomialMap& f);

struct TiltSweepConfig {
  int instances = 100;
  int k = 1;
  double b_extra_max = 3.0;  // B = Id + diag(uniform[0, b_extra_max])
  double v_max = 2.0;        // |v| <= v_max
  double r_min = 0.2;
  double r_max = 2.0;
};

struct ExperimentConfig {
  std::string experiment = "experiment";
  std::optional<PolynomialMap> map;
  double horizon = 10.0;  // "T"
  double h = 1e-3;
  std::int64_t paths = 1000;
  std::vector<double> r_grid{0.5, 1.0, 2.0};
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  std::vector<double> weights;  // empty: Euclidean tubes
  double rank_tol = 1e-2;
  std::optional<double> distance;  // closed-form d(0, Z) for baselines
  int record_stride = 1;
  std::vector<TestFunctional> functionals;
  std::vector<ComplexVec> density_points;
  TiltSweepConfig tilt;
};

/// Parses and validates. Missing optional fields take the defaults above.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig config_from_string(const std::string& text);
/// Every field, defaults included; parsing the result gives back the same
/// configuration.
Json config_to_json(const ExperimentConfig& c);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

Json complex_to_json(Complex c);
Json vec_to_json(const ComplexVec& v);

}  // namespace eldan
