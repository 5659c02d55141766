// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/eldan.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "eldan/config.hpp"
#include "eldan/error.hpp"
#include "eldan/experiments.hpp"
#include "eldan/gaussian_geometry.hpp"
#include "eldan/variety.hpp"

struct eldan_config {
  eldan::ExperimentConfig cfg;
};

struct eldan_map {
  eldan::PolynomialMap map;
};

namespace {

thread_local std::string last_error;

eldan_status status_of(eldan::ErrorKind kind) {
  using eldan::ErrorKind;
  switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::unsupported:
      return ELDAN_ERR_INVALID;
    case ErrorKind::domain:
    case ErrorKind::singularity:
    case ErrorKind::projection:
    case ErrorKind::state:
      return ELDAN_ERR_NUMERICAL;
    case ErrorKind::invariant:
      return ELDAN_ERR_VERDICT;
  }
  return ELDAN_ERR_INTERNAL;
}

void set_error(const char* kind, const std::string& message,
               const std::string& path) {
  eldan::Json j = {{"kind", kind}, {"message", message}, {"path", path}};
  last_error = j.dump();
}

// Runs fn, translating exceptions into status codes and the thread-local
// error record.
template <class Fn>
eldan_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    return fn();
  } catch (const eldan::Error& e) {
    set_error(eldan::to_string(e.kind()), e.what(), e.path());
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    set_error("internal", "out of memory", "");
  } catch (const std::exception& e) {
    set_error("internal", e.what(), "");
  } catch (...) {
    set_error("internal", "unknown exception", "");
  }
  return ELDAN_ERR_INTERNAL;
}

eldan_status null_arg(const char* name) {
  set_error("validation", std::string("null argument: ") + name, "");
  return ELDAN_ERR_INVALID;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* eldan_version(void) { return "0.1.0"; }

const char* eldan_last_error(void) { return last_error.c_str(); }

void eldan_string_free(char* s) { std::free(s); }

eldan_status eldan_config_parse(const char* json, eldan_config** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new eldan_config{eldan::config_from_string(json)};
    return ELDAN_OK;
  });
}

void eldan_config_free(eldan_config* cfg) { delete cfg; }

eldan_status eldan_config_to_json(const eldan_config* cfg, char** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = dup_string(eldan::config_to_json(cfg->cfg).dump(2));
    return ELDAN_OK;
  });
}

eldan_status eldan_config_hash(const eldan_config* cfg, char** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = dup_string(eldan::config_hash(cfg->cfg));
    return ELDAN_OK;
  });
}

eldan_status eldan_config_set_seed(eldan_config* cfg, uint64_t seed) {
  if (!cfg) return null_arg("cfg");
  cfg->cfg.seed = seed;
  return ELDAN_OK;
}

// Overrides go through the JSON form so that they are validated exactly like
// values read from a file.
eldan_status eldan_config_set_real(eldan_config* cfg, const char* key,
                                   double value) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  return guarded([&] {
    std::string k = key;
    if (k != "T" && k != "h")
      eldan::fail(eldan::ErrorKind::validation, "unknown real key '" + k + "'");
    eldan::Json j = eldan::config_to_json(cfg->cfg);
    j[k] = value;
    cfg->cfg = eldan::config_from_json(j);
    return ELDAN_OK;
  });
}

eldan_status eldan_config_set_int(eldan_config* cfg, const char* key,
                                  int64_t value) {
  if (!cfg) return null_arg("cfg");
  if (!key) return null_arg("key");
  return guarded([&] {
    std::string k = key;
    if (k != "paths" && k != "samples")
      eldan::fail(eldan::ErrorKind::validation, "unknown integer key '" + k + "'");
    eldan::Json j = eldan::config_to_json(cfg->cfg);
    j[k] = value;
    cfg->cfg = eldan::config_from_json(j);
    return ELDAN_OK;
  });
}

eldan_status eldan_run(const eldan_config* cfg, const char* command,
                       int threads, char** out_json) {
  if (!cfg) return null_arg("cfg");
  if (!command) return null_arg("command");
  if (!out_json) return null_arg("out_json");
  *out_json = nullptr;
  return guarded([&] {
    eldan::RunOptions opts;
    opts.threads = threads > 0 ? threads : 0;
    auto res = eldan::run_experiment(command, cfg->cfg, opts);
    eldan::Json files = eldan::Json::array();
    for (auto& [name, content] : res.files)
      files.push_back({{"name", name}, {"content", content}});
    eldan::Json j = {{"verdict", res.verdict_ok ? "pass" : "fail"},
                     {"summary", res.summary},
                     {"files", std::move(files)}};
    *out_json = dup_string(j.dump());
    if (!res.verdict_ok) {
      set_error("verdict", "an invariant or inequality check failed", "");
      return ELDAN_ERR_VERDICT;
    }
    return ELDAN_OK;
  });
}

eldan_status eldan_map_parse(const char* json, eldan_map** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    eldan::Json j;
    try {
      j = eldan::Json::parse(json);
    } catch (const eldan::Json::parse_error& e) {
      eldan::fail(eldan::ErrorKind::validation,
                  std::string("malformed JSON: ") + e.what(), "/");
    }
    *out = new eldan_map{eldan::map_from_json(j)};
    return ELDAN_OK;
  });
}

void eldan_map_free(eldan_map* map) { delete map; }

eldan_status eldan_map_dims(const eldan_map* map, int* n, int* k) {
  if (!map) return null_arg("map");
  if (n) *n = map->map.n();
  if (k) *k = map->map.k();
  return ELDAN_OK;
}

eldan_status eldan_map_eval(const eldan_map* map, const double* z,
                            double* out) {
  if (!map) return null_arg("map");
  if (!z) return null_arg("z");
  if (!out) return null_arg("out");
  return guarded([&] {
    const int n = map->map.n();
    eldan::ComplexVec v(n);
    for (int j = 0; j < n; ++j) v(j) = {z[2 * j], z[2 * j + 1]};
    eldan::ComplexVec f = map->map.eval(v);
    for (Eigen::Index j = 0; j < f.size(); ++j) {
      out[2 * j] = f(j).real();
      out[2 * j + 1] = f(j).imag();
    }
    return ELDAN_OK;
  });
}

eldan_status eldan_map_distance(const eldan_map* map, uint64_t seed,
                                double* out) {
  if (!map) return null_arg("map");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto starts = eldan::default_distance_starts(map->map, seed);
    *out = eldan::distance_to_origin(map->map, starts).distance;
    return ELDAN_OK;
  });
}

eldan_status eldan_disc_measure(int k, double center_norm, double radius,
                                double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = eldan::disc_measure(k, center_norm, radius);
    return ELDAN_OK;
  });
}

eldan_status eldan_affine_tube_measure(int n, int k, double d, double r,
                                       double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    if (!(d >= 0.0) || !(r >= 0.0))
      eldan::fail(eldan::ErrorKind::validation, "d and r must be >= 0");
    *out = eldan::affine_tube_measure(n, k, d, r);
    return ELDAN_OK;
  });
}

}  // extern "C"
