#ifndef DOA_FFI_H
#define DOA_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DOA_ALGORITHM_WLSLP 0

#define DOA_ALGORITHM_ROOT_MUSIC 1

#define DOA_ALGORITHM_UNITARY_ESPRIT 2

/**
 * Result codes.
 */
typedef enum DoaStatus {
  DOA_STATUS_OK = 0,
  DOA_STATUS_NULL_POINTER = 1,
  DOA_STATUS_INVALID_ARGUMENT = 2,
  DOA_STATUS_DOMAIN = 3,
  DOA_STATUS_ESTIMATION = 4,
  DOA_STATUS_SINGULAR_FISHER = 5,
  DOA_STATUS_CONFIG = 6,
  DOA_STATUS_FORMAT = 7,
  DOA_STATUS_IO = 8,
  DOA_STATUS_BUFFER_TOO_SMALL = 9,
  DOA_STATUS_PANIC = 10,
} DoaStatus;

/**
 * Opaque estimator handle: array geometry, algorithm and solver settings.
 */
typedef struct DoaEstimator DoaEstimator;

/**
 * Creates an estimator for a ULA with `sensors` elements.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum DoaStatus doa_estimator_new(uint32_t sensors,
                                 double spacing_ratio,
                                 uint32_t algorithm,
                                 struct DoaEstimator **out);

/**
 * Releases an estimator. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`doa_estimator_new`] and must not be used afterwards.
 */
void doa_estimator_free(struct DoaEstimator *handle);

/**
 * Overrides the WLS iteration cap and relative tolerance.
 *
 * # Safety
 * `handle` must be a live estimator handle.
 */
enum DoaStatus doa_estimator_set_wls(struct DoaEstimator *handle, uint32_t max_iter, double tol);

/**
 * Number of sensors of an estimator, 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live estimator handle.
 */
uint32_t doa_estimator_sensor_count(const struct DoaEstimator *handle);

/**
 * Estimates `k` angles (degrees, ascending) from M×N snapshots.
 *
 * `snapshots` holds `2·M·n_snapshots` doubles. `warning_count` may be null.
 *
 * # Safety
 * All non-null pointers must be valid for the stated lengths.
 */
enum DoaStatus doa_estimate_snapshots(const struct DoaEstimator *handle,
                                      const double *snapshots,
                                      size_t n_snapshots,
                                      size_t k,
                                      double *angles_out,
                                      size_t angles_len,
                                      uint32_t *warning_count);

/**
 * Estimates `k` angles from an M×M Hermitian covariance (`2·M·M` doubles).
 *
 * # Safety
 * All non-null pointers must be valid for the stated lengths.
 */
enum DoaStatus doa_estimate_covariance(const struct DoaEstimator *handle,
                                       const double *covariance,
                                       size_t k,
                                       double *angles_out,
                                       size_t angles_len,
                                       uint32_t *warning_count);

/**
 * Stochastic CRB standard deviations (degrees) for unit-power sources at
 * `snr_db`, one per angle.
 *
 * # Safety
 * `angles` must hold `k` doubles and `bounds_out` `bounds_len` doubles.
 */
enum DoaStatus doa_stochastic_crb(uint32_t sensors,
                                  double spacing_ratio,
                                  const double *angles,
                                  size_t k,
                                  double snr_db,
                                  size_t n_snapshots,
                                  double *bounds_out,
                                  size_t bounds_len);

/**
 * Runs a sweep described by config text and returns the CSV table in a
 * newly allocated string to be released with [`doa_string_free`].
 *
 * # Safety
 * `config_text` must be a NUL-terminated string; `csv_out` must be writable.
 */
enum DoaStatus doa_sweep_csv(const char *config_text, size_t jobs, char **csv_out);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be freed twice.
 */
void doa_string_free(char *s);

/**
 * Copies the calling thread's last error message into `buf` (truncating,
 * always NUL-terminated when `len > 0`). Returns the full message length
 * excluding the terminator, or 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t doa_last_error_message(char *buf, size_t len);

/**
 * Static name of a status code.
 */
const char *doa_status_name(enum DoaStatus status);

#endif  /* DOA_FFI_H */
