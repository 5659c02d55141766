/* Copyright 2026 The eldan authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the eldan library: fiber-confined stochastic localization,
 * Gaussian tube measures and their Monte Carlo verification.
 *
 * Conventions:
 *  - Functions return an eldan_status. On failure, eldan_last_error() gives
 *    a JSON object {"kind", "message", "path"} for the calling thread.
 *  - Strings returned through char** are owned by the caller and must be
 *    released with eldan_string_free().
 *  - Complex vectors are passed as interleaved (re, im) double arrays.
 */
#ifndef ELDAN_ELDAN_H_
#define ELDAN_ELDAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ELDAN_BUILDING_LIBRARY)
#    define ELDAN_API __declspec(dllexport)
#  else
#    define ELDAN_API __declspec(dllimport)
#  endif
#else
#  define ELDAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eldan_status {
  ELDAN_OK = 0,
  ELDAN_ERR_INVALID = 1,   /* malformed input, bad config, unsupported */
  ELDAN_ERR_NUMERICAL = 2, /* singularity, projection failure, bad state */
  ELDAN_ERR_VERDICT = 3,   /* an invariant or inequality check failed */
  ELDAN_ERR_INTERNAL = 4
} eldan_status;

typedef struct eldan_config eldan_config;
typedef struct eldan_map eldan_map;

ELDAN_API const char* eldan_version(void);

/* JSON description of the last error on this thread; "" if none. */
ELDAN_API const char* eldan_last_error(void);

ELDAN_API void eldan_string_free(char* s);

/* ---- experiment configurations ---------------------------------------- */

ELDAN_API eldan_status eldan_config_parse(const char* json, eldan_config** out);
ELDAN_API void eldan_config_free(eldan_config* cfg);
/* Canonical JSON with every default filled in. */
ELDAN_API eldan_status eldan_config_to_json(const eldan_config* cfg, char** out);
/* 16 hex digits identifying the canonical configuration. */
ELDAN_API eldan_status eldan_config_hash(const eldan_config* cfg, char** out);

ELDAN_API eldan_status eldan_config_set_seed(eldan_config* cfg, uint64_t seed);
/* key: "T" or "h". */
ELDAN_API eldan_status eldan_config_set_real(eldan_config* cfg, const char* key,
                                             double value);
/* key: "paths" or "samples". */
ELDAN_API eldan_status eldan_config_set_int(eldan_config* cfg, const char* key,
                                            int64_t value);

/* Runs one of: localize, tube, baseline, mixture, centerlaw, tilt, selftest.
 * threads <= 0 uses every hardware thread. On ELDAN_OK and ELDAN_ERR_VERDICT
 * *out_json receives {"verdict", "summary", "files": [{"name", "content"}]}. */
ELDAN_API eldan_status eldan_run(const eldan_config* cfg, const char* command,
                                 int threads, char** out_json);

/* ---- polynomial maps --------------------------------------------------- */

ELDAN_API eldan_status eldan_map_parse(const char* json, eldan_map** out);
ELDAN_API void eldan_map_free(eldan_map* map);
ELDAN_API eldan_status eldan_map_dims(const eldan_map* map, int* n, int* k);
/* z: 2n doubles, out: 2k doubles. */
ELDAN_API eldan_status eldan_map_eval(const eldan_map* map, const double* z,
                                      double* out);
/* Multi-start upper bound on d(0, Z). */
ELDAN_API eldan_status eldan_map_distance(const eldan_map* map, uint64_t seed,
                                          double* out);

/* ---- closed forms ------------------------------------------------------ */

ELDAN_API eldan_status eldan_disc_measure(int k, double center_norm,
                                          double radius, double* out);
ELDAN_API eldan_status eldan_affine_tube_measure(int n, int k, double d,
                                                 double r, double* out);

#ifdef __cplusplus
}
#endif

#endif /* ELDAN_ELDAN_H_ */
