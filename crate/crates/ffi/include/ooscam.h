/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef OOSCAM_H
#define OOSCAM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum OoscamStatus {
  OOSCAM_STATUS_OK = 0,
  OOSCAM_STATUS_NULL_POINTER = 1,
  OOSCAM_STATUS_INVALID_INPUT = 2,
  OOSCAM_STATUS_SOLVER_FAILURE = 3,
  OOSCAM_STATUS_UNSUPPORTED_ORBIT = 4,
  OOSCAM_STATUS_ENCOUNTER_MODEL_INVALID = 5,
  OOSCAM_STATUS_INFEASIBLE_GEOMETRY = 6,
  OOSCAM_STATUS_SCHEMA = 7,
  OOSCAM_STATUS_IO = 8,
  OOSCAM_STATUS_INTERNAL = 9,
} OoscamStatus;

// How [`ooscam_train`] builds its starting table.
typedef enum OoscamInitMode {
  OOSCAM_INIT_MODE_RANDOM = 0,
  OOSCAM_INIT_MODE_LAMBERT = 1,
} OoscamInitMode;

// Opaque scenario handle.
typedef struct OoscamScenario OoscamScenario;

// Opaque four-row action table handle.
typedef struct OoscamTable OoscamTable;

// Reward breakdown and headline metrics of one episode.
typedef struct OoscamEpisodeResult {
  double r_pc;
  double r_fuel;
  double r_dev;
  double r_dock_pos;
  double r_dock_vel;
  double total;
  double pc;
  double fuel_used;
  // 1 when the servicer docked.
  int docked;
  // Docking epoch, NaN when undocked.
  double t_dock_mjd2000;
  // 1 when a numerical failure ended the episode early.
  int failed;
} OoscamEpisodeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build identifier as a NUL-terminated string owned by the library.
const char *ooscam_version(void);

// Copies the calling thread's last error message into `buf` (truncated and
// NUL-terminated) and returns the full length including the terminator.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t ooscam_last_error_message(char *buf, size_t len);

// Eccentric anomaly for mean anomaly `mean_anomaly` (rad) and eccentricity
// `e` in [0, 1).
//
// # Safety
// `out` must be a valid pointer to one double.
enum OoscamStatus ooscam_solve_kepler(double mean_anomaly, double e, double *out);

// Single-revolution Lambert transfer about the Earth from `r0` to `r1` in
// `dt` seconds. `prograde` nonzero selects the transfer with h_z ≥ 0.
//
// # Safety
// `r0`, `r1` must point to 3 readable doubles, `v0_out`, `v1_out` to 3
// writable doubles.
enum OoscamStatus ooscam_lambert(const double *r0,
                                 const double *r1,
                                 double dt,
                                 int prograde,
                                 double *v0_out,
                                 double *v1_out);

// Probability that a Gaussian miss with mean (`miss_x`, `miss_y`) km and
// row-major 2×2 covariance `cov` (km²) falls inside a disk of `radius` km.
//
// # Safety
// `cov` must point to 4 readable doubles and `out` to one writable double.
enum OoscamStatus ooscam_collision_probability(double miss_x,
                                               double miss_y,
                                               const double *cov,
                                               double radius,
                                               double *out);

// The published case study.
//
// # Safety
// `out` must be a valid pointer; the handle is released with
// [`ooscam_scenario_free`].
enum OoscamStatus ooscam_scenario_case_study(struct OoscamScenario **out);

// The case study with a colliding debris object.
//
// # Safety
// As [`ooscam_scenario_case_study`].
enum OoscamStatus ooscam_scenario_case_study_conjunction(struct OoscamScenario **out);

// Parses a scenario file's JSON text.
//
// # Safety
// `json` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
enum OoscamStatus ooscam_scenario_from_json(const char *json, struct OoscamScenario **out);

// Serializes a scenario; release the string with [`ooscam_string_free`].
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum OoscamStatus ooscam_scenario_to_json(const struct OoscamScenario *scenario, char **out);

// Start and end of the scenario window, mjd2000.
//
// # Safety
// `scenario` must be a live handle; `start`, `end` valid pointers.
enum OoscamStatus ooscam_scenario_window(const struct OoscamScenario *scenario,
                                         double *start,
                                         double *end);

// # Safety
// `scenario` must be null or a handle from this library, freed once.
void ooscam_scenario_free(struct OoscamScenario *scenario);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void ooscam_string_free(char *s);

// Builds a table from 16 values: (dv_x, dv_y, dv_z [m/s], t [mjd2000]) per
// row, rows in order.
//
// # Safety
// `params` must point to 16 readable doubles and `out` be a valid pointer.
enum OoscamStatus ooscam_table_from_params(const double *params, struct OoscamTable **out);

// Writes the 16 table values in the layout of [`ooscam_table_from_params`].
//
// # Safety
// `table` must be a live handle and `out` point to 16 writable doubles.
enum OoscamStatus ooscam_table_params(const struct OoscamTable *table, double *out);

// # Safety
// `table` must be null or a handle from this library, freed once.
void ooscam_table_free(struct OoscamTable *table);

// Runs one episode with the default environment configuration.
//
// # Safety
// Handles must be live and `out` a valid pointer.
enum OoscamStatus ooscam_run_episode(const struct OoscamScenario *scenario,
                                     const struct OoscamTable *table,
                                     struct OoscamEpisodeResult *out);

// Trains a table with the default Cross-Entropy configuration for `mode`.
// `iterations` and `sessions` override the defaults when nonzero. The
// Lambert transfer departs at the scenario start and arrives 0.0704 days
// later.
//
// # Safety
// `scenario` must be a live handle; `best_out` and `reward_out` valid
// pointers. The returned table is released with [`ooscam_table_free`].
enum OoscamStatus ooscam_train(const struct OoscamScenario *scenario,
                               enum OoscamInitMode mode,
                               uint64_t seed,
                               uint32_t iterations,
                               uint32_t sessions,
                               struct OoscamTable **best_out,
                               double *reward_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OOSCAM_H */
