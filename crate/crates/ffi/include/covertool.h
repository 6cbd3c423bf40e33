#ifndef COVERTOOL_H
#define COVERTOOL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum CtStatus {
  CT_STATUS_OK = 0,
  CT_STATUS_NULL_ARGUMENT = 1,
  CT_STATUS_INVALID_UTF8 = 2,
  CT_STATUS_IO = 3,
  CT_STATUS_PARSE = 4,
  CT_STATUS_VALIDATION = 5,
  CT_STATUS_DOMAIN = 6,
  CT_STATUS_BUFFER_TOO_SMALL = 7,
  CT_STATUS_INTERNAL = 99,
} CtStatus;

/**
 * Opaque deployment handle.
 */
typedef struct CtDeployment CtDeployment;

/**
 * Opaque scenario handle.
 */
typedef struct CtScenario CtScenario;

/**
 * Result of [`ct_evaluate`].
 */
typedef struct CtEstimate {
  /**
   * Whether every constraint holds and each sensor sits in a cost zone.
   */
  bool feasible;
  /**
   * Largest constraint value; positive means violated.
   */
  double max_violation;
  /**
   * The following fields are NaN when a sensor lies outside its cost zones.
   */
  double placement;
  double uncov_estimate;
  double total;
  uint64_t samples_used;
} CtEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ct_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * always NUL-terminated when `len > 0`). Returns the full message length
 * excluding the NUL, or 0 when there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ct_last_error(char *buf, size_t len);

/**
 * Loads a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CtStatus ct_scenario_load(const char *path, struct CtScenario **out);

/**
 * Parses a scenario from a JSON string.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CtStatus ct_scenario_parse(const char *json, struct CtScenario **out);

/**
 * # Safety
 * `sc` must be null or a handle not yet freed.
 */
void ct_scenario_free(struct CtScenario *sc);

/**
 * Number of sensors, or 0 for a null handle.
 *
 * # Safety
 * `sc` must be null or a live handle.
 */
size_t ct_scenario_sensor_count(const struct CtScenario *sc);

/**
 * Number of quality levels, or 0 for a null handle.
 *
 * # Safety
 * `sc` must be null or a live handle.
 */
size_t ct_scenario_quality_count(const struct CtScenario *sc);

/**
 * RoI volume, or NaN for a null handle.
 *
 * # Safety
 * `sc` must be null or a live handle.
 */
double ct_scenario_roi_volume(const struct CtScenario *sc);

/**
 * Loads a deployment file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CtStatus ct_deployment_load(const char *path, struct CtDeployment **out);

/**
 * Parses a deployment from a JSON string.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CtStatus ct_deployment_parse(const char *json, struct CtDeployment **out);

/**
 * Creates an empty deployment.
 *
 * # Safety
 * `out` must be writable.
 */
enum CtStatus ct_deployment_new(struct CtDeployment **out);

/**
 * Places (or moves) sensor `id`.
 *
 * # Safety
 * `d` must be a live handle and `id` a NUL-terminated string.
 */
enum CtStatus ct_deployment_set(struct CtDeployment *d,
                                const char *id,
                                double x,
                                double y,
                                double z);

/**
 * # Safety
 * `d` must be null or a handle not yet freed.
 */
void ct_deployment_free(struct CtDeployment *d);

/**
 * Writes the constraint values `[obstacle, admissible, isolation]` of each
 * placed sensor, in scenario order, into `values`. `count` receives the
 * number of values; when it exceeds `len`, nothing is written and
 * `BufferTooSmall` is returned.
 *
 * # Safety
 * Handles must be live, `values` must hold `len` doubles, `count` writable.
 */
enum CtStatus ct_constraints(const struct CtScenario *sc,
                             const struct CtDeployment *d,
                             double *values,
                             size_t len,
                             size_t *count);

/**
 * Checks constraints and estimates the objective to within relative error
 * `eps` with confidence `1 - delta`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum CtStatus ct_evaluate(const struct CtScenario *sc,
                          const struct CtDeployment *d,
                          double eps,
                          double delta,
                          uint64_t seed,
                          struct CtEstimate *out);

/**
 * Whether point `(x, y, z)` stays covered at quality index `q` under every
 * failure of `j` placed sensors.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum CtStatus ct_point_covered(const struct CtScenario *sc,
                               const struct CtDeployment *d,
                               size_t j,
                               size_t q,
                               double x,
                               double y,
                               double z,
                               bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COVERTOOL_H */
