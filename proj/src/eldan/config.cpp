// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "eldan/error.hpp"

namespace eldan {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  fail(ErrorKind::validation, msg, path.empty() ? "/" : path);
}

std::string at(const std::string& path, const std::string& key) {
  return path + "/" + key;
}
std::string at(const std::string& path, std::size_t i) {
  return path + "/" + std::to_string(i);
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) bad(path, "expected a finite number");
  return v;
}

std::int64_t as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  if (j.is_number_unsigned() &&
      j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
    bad(path, "integer out of range");
  return j.get<std::int64_t>();
}

std::uint64_t as_u64(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) bad(path, "expected an unsigned integer");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  bad(path, "expected a 64-bit unsigned integer");
}

const Json& array_at(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

Complex as_complex(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) bad(path, "expected a [re, im] pair");
  return {as_double(j[0], at(path, 0)), as_double(j[1], at(path, 1))};
}

ComplexVec as_vec(const Json& j, const std::string& path) {
  array_at(j, path);
  ComplexVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = as_complex(j[i], at(path, i));
  return v;
}

std::vector<double> as_reals(const Json& j, const std::string& path) {
  array_at(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_double(j[i], at(path, i)));
  return out;
}

void check_keys(const Json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) bad(at(path, it.key()), "unknown key");
}

const Json& required(const Json& j, const std::string& key,
                     const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) bad(at(path, key), "missing required key");
  return *it;
}

TestFunctional functional_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  const Json& type = required(j, "type", path);
  if (!type.is_string()) bad(at(path, "type"), "expected a string");
  const std::string t = type.get<std::string>();
  if (t == "one") {
    check_keys(j, path, {"type"});
    return functional::One{};
  }
  if (t == "squared_norm") {
    check_keys(j, path, {"type"});
    return functional::SquaredNorm{};
  }
  if (t == "halfspace") {
    check_keys(j, path, {"type", "u", "c"});
    functional::HalfSpace hs;
    hs.u = as_vec(required(j, "u", path), at(path, "u"));
    if (j.contains("c")) hs.c = as_double(j["c"], at(path, "c"));
    return hs;
  }
  if (t == "bounded_exp") {
    check_keys(j, path, {"type", "u", "cap"});
    functional::BoundedExp be;
    be.u = as_vec(required(j, "u", path), at(path, "u"));
    be.cap = as_double(required(j, "cap", path), at(path, "cap"));
    if (!(be.cap > 0.0)) bad(at(path, "cap"), "cap must be > 0");
    return be;
  }
  bad(at(path, "type"), "unsupported functional '" + t + "'");
}

Json functional_to_json(const TestFunctional& phi) {
  Json j;
  j["type"] = functional_tag(phi);
  if (auto* hs = std::get_if<functional::HalfSpace>(&phi)) {
    j["u"] = vec_to_json(hs->u);
    j["c"] = hs->c;
  } else if (auto* be = std::get_if<functional::BoundedExp>(&phi)) {
    j["u"] = vec_to_json(be->u);
    j["cap"] = be->cap;
  }
  return j;
}

}  // namespace

Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Json vec_to_json(const ComplexVec& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(complex_to_json(v(i)));
  return j;
}

PolynomialMap map_from_json(const Json& j, const std::string& where) {
  check_keys(j, where, {"n", "k", "components", "base_point"});
  const std::int64_t n = as_int(required(j, "n", where), at(where, "n"));
  if (n < 1 || n > 64) bad(at(where, "n"), "n must be in [1, 64]");
  const std::int64_t k = as_int(required(j, "k", where), at(where, "k"));
  if (k < 1 || k > n) bad(at(where, "k"), "k must satisfy 1 <= k <= n");

  const std::string cpath = at(where, "components");
  const Json& comps = array_at(required(j, "components", where), cpath);
  if (static_cast<std::int64_t>(comps.size()) != k)
    bad(cpath, "expected k = " + std::to_string(k) + " components");
  std::vector<Component> components;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const std::string p = at(cpath, c);
    const Json& monos = array_at(comps[c], p);
    Component comp;
    for (std::size_t m = 0; m < monos.size(); ++m) {
      const std::string mp = at(p, m);
      check_keys(monos[m], mp, {"coeff", "exps"});
      Monomial mono;
      mono.coeff = as_complex(required(monos[m], "coeff", mp), at(mp, "coeff"));
      const std::string ep = at(mp, "exps");
      const Json& exps = array_at(required(monos[m], "exps", mp), ep);
      for (std::size_t e = 0; e < exps.size(); ++e) {
        std::int64_t v = as_int(exps[e], at(ep, e));
        if (v < 0 || v > 64) bad(at(ep, e), "exponent must be in [0, 64]");
        mono.exps.push_back(static_cast<int>(v));
      }
      comp.push_back(std::move(mono));
    }
    components.push_back(std::move(comp));
  }
  ComplexVec base = as_vec(required(j, "base_point", where),
                           at(where, "base_point"));
  try {
    return PolynomialMap(static_cast<int>(n), std::move(components),
                         std::move(base));
  } catch (const Error& e) {
    fail(e.kind(), e.what(), where + e.path());
  }
}

Json map_to_json(const PolynomialMap& f) {
  Json comps = Json::array();
  for (const auto& comp : f.components()) {
    Json monos = Json::array();
    for (const auto& m : comp)
      monos.push_back({{"coeff", complex_to_json(m.coeff)}, {"exps", m.exps}});
    comps.push_back(std::move(monos));
  }
  return {{"n", f.n()},
          {"k", f.k()},
          {"components", std::move(comps)},
          {"base_point", vec_to_json(f.base_point())}};
}

ExperimentConfig config_from_json(const Json& j) {
  check_keys(j, "",
             {"experiment", "map", "T", "h", "paths", "r_grid", "samples",
              "seed", "weights", "rank_tol", "distance", "record_stride",
              "functionals", "density_points", "tilt"});
  ExperimentConfig c;
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) bad("/experiment", "expected a string");
    c.experiment = j["experiment"].get<std::string>();
  }
  if (j.contains("map")) c.map = map_from_json(j["map"], "/map");
  if (j.contains("T")) {
    c.horizon = as_double(j["T"], "/T");
    if (!(c.horizon > 0.0)) bad("/T", "T must be > 0");
  }
  if (j.contains("h")) {
    c.h = as_double(j["h"], "/h");
    if (!(c.h > 0.0)) bad("/h", "h must be > 0");
  }
  if (j.contains("paths")) {
    c.paths = as_int(j["paths"], "/paths");
    if (c.paths < 2) bad("/paths", "paths must be >= 2");
  }
  if (j.contains("r_grid")) {
    c.r_grid = as_reals(j["r_grid"], "/r_grid");
    if (c.r_grid.empty()) bad("/r_grid", "r_grid must not be empty");
    for (std::size_t i = 0; i < c.r_grid.size(); ++i) {
      if (c.r_grid[i] < 0.0) bad(at("/r_grid", i), "radii must be >= 0");
      if (i && !(c.r_grid[i] > c.r_grid[i - 1]))
        bad(at("/r_grid", i), "r_grid must be strictly increasing");
    }
  }
  if (j.contains("samples")) {
    c.samples = as_int(j["samples"], "/samples");
    if (c.samples < 1) bad("/samples", "samples must be >= 1");
  }
  if (j.contains("seed")) c.seed = as_u64(j["seed"], "/seed");
  if (j.contains("weights")) {
    c.weights = as_reals(j["weights"], "/weights");
    for (std::size_t i = 0; i < c.weights.size(); ++i)
      if (!(c.weights[i] > 0.0)) bad(at("/weights", i), "weights must be > 0");
    if (c.map && !c.weights.empty() &&
        static_cast<int>(c.weights.size()) != c.map->n())
      bad("/weights", "weights must have length n");
  }
  if (j.contains("rank_tol")) {
    c.rank_tol = as_double(j["rank_tol"], "/rank_tol");
    if (!(c.rank_tol >= 0.0)) bad("/rank_tol", "rank_tol must be >= 0");
  }
  if (j.contains("distance")) {
    c.distance = as_double(j["distance"], "/distance");
    if (!(*c.distance >= 0.0)) bad("/distance", "distance must be >= 0");
  }
  if (j.contains("record_stride")) {
    std::int64_t s = as_int(j["record_stride"], "/record_stride");
    if (s < 1 || s > INT32_MAX) bad("/record_stride", "record_stride must be >= 1");
    c.record_stride = static_cast<int>(s);
  }
  if (j.contains("functionals")) {
    const Json& fs = array_at(j["functionals"], "/functionals");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string p = at("/functionals", i);
      c.functionals.push_back(functional_from_json(fs[i], p));
      if (c.map) {
        const ComplexVec* u = nullptr;
        if (auto* hs = std::get_if<functional::HalfSpace>(&c.functionals.back()))
          u = &hs->u;
        if (auto* be = std::get_if<functional::BoundedExp>(&c.functionals.back()))
          u = &be->u;
        if (u && u->size() != c.map->n()) bad(at(p, "u"), "u must have length n");
      }
    }
  }
  if (j.contains("density_points")) {
    const Json& ps = array_at(j["density_points"], "/density_points");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string p = at("/density_points", i);
      c.density_points.push_back(as_vec(ps[i], p));
      if (c.map && c.density_points.back().size() != c.map->n())
        bad(p, "point must have length n");
    }
  }
  if (j.contains("tilt")) {
    const Json& t = j["tilt"];
    check_keys(t, "/tilt",
               {"instances", "k", "b_extra_max", "v_max", "r_min", "r_max"});
    auto& s = c.tilt;
    if (t.contains("instances")) {
      std::int64_t v = as_int(t["instances"], "/tilt/instances");
      if (v < 1 || v > 1000000) bad("/tilt/instances", "instances must be in [1, 1e6]");
      s.instances = static_cast<int>(v);
    }
    if (t.contains("k")) {
      std::int64_t v = as_int(t["k"], "/tilt/k");
      if (v < 1 || v > 2) bad("/tilt/k", "tilt sweeps support k = 1, 2");
      s.k = static_cast<int>(v);
    }
    if (t.contains("b_extra_max")) s.b_extra_max = as_double(t["b_extra_max"], "/tilt/b_extra_max");
    if (t.contains("v_max")) s.v_max = as_double(t["v_max"], "/tilt/v_max");
    if (t.contains("r_min")) s.r_min = as_double(t["r_min"], "/tilt/r_min");
    if (t.contains("r_max")) s.r_max = as_double(t["r_max"], "/tilt/r_max");
    if (s.b_extra_max < 0.0) bad("/tilt/b_extra_max", "must be >= 0");
    if (s.v_max < 0.0) bad("/tilt/v_max", "must be >= 0");
    if (s.r_min < 0.0) bad("/tilt/r_min", "must be >= 0");
    if (s.r_max < s.r_min) bad("/tilt/r_max", "must be >= r_min");
  }
  return c;
}

ExperimentConfig config_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::validation, std::string("malformed JSON: ") + e.what(), "/");
  }
  return config_from_json(j);
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = c.experiment;
  if (c.map) j["map"] = map_to_json(*c.map);
  j["T"] = c.horizon;
  j["h"] = c.h;
  j["paths"] = c.paths;
  j["r_grid"] = c.r_grid;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["weights"] = c.weights;
  j["rank_tol"] = c.rank_tol;
  if (c.distance) j["distance"] = *c.distance;
  j["record_stride"] = c.record_stride;
  Json fs = Json::array();
  for (const auto& phi : c.functionals) fs.push_back(functional_to_json(phi));
  j["functionals"] = std::move(fs);
  Json ps = Json::array();
  for (const auto& p : c.density_points) ps.push_back(vec_to_json(p));
  j["density_points"] = std::move(ps);
  j["tilt"] = {{"instances", c.tilt.instances}, {"k", c.tilt.k},
               {"b_extra_max", c.tilt.b_extra_max}, {"v_max", c.tilt.v_max},
               {"r_min", c.tilt.r_min}, {"r_max", c.tilt.r_max}};
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string text = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace eldan
