#ifndef DYING_CHANNEL_H
#define DYING_CHANNEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum {
  DCL_STATUS_OK = 0,
  DCL_STATUS_NULL_POINTER = 1,
  // Argument outside its domain.
  DCL_STATUS_DOMAIN = 2,
  DCL_STATUS_MODEL = 3,
  DCL_STATUS_UNSUPPORTED = 4,
  DCL_STATUS_PRECONDITION = 5,
  DCL_STATUS_INFEASIBLE = 6,
  DCL_STATUS_CALIBRATION = 7,
  DCL_STATUS_OUT_OF_REGIME = 8,
  // Output buffer too small.
  DCL_STATUS_BUFFER_TOO_SMALL = 9,
  DCL_STATUS_PANIC = 10,
} DclStatus;

typedef enum {
  // Independent Rayleigh blocks; exponential power gain with the given rate.
  DCL_FADING_RAYLEIGH = 0,
  // Independent log-normal blocks, `exp(N(0, 1))`.
  DCL_FADING_LOG_NORMAL = 1,
  // One Rayleigh gain shared by all blocks.
  DCL_FADING_IDENTICAL_RAYLEIGH = 2,
  DCL_FADING_IDENTICAL_LOG_NORMAL = 3,
} DclFading;

typedef enum {
  // Chosen from the fading model.
  DCL_PROGRAM_AUTO = 0,
  DCL_PROGRAM_UNIFORM = 1,
  DCL_PROGRAM_HIGH_SNR_RAYLEIGH = 2,
  DCL_PROGRAM_LOG_NORMAL_UPPER = 3,
} DclProgram;

// Opaque parallel-channel configuration.
typedef struct DclParallelConfig DclParallelConfig;

// Opaque single-channel configuration.
typedef struct DclSingleConfig DclSingleConfig;

typedef struct {
  double beta;
  double c;
  double xi;
  double k_real;
  size_t k_int;
  bool interior;
} DclOptimalK;

typedef struct {
  double p_hat;
  // Standard error of `p_hat`.
  double std_error;
  uint64_t trials;
  uint64_t seed;
} DclEstimate;

typedef struct {
  double objective;
  double kkt_residual;
  size_t iterations;
  // True when the solver met its tolerance.
  bool optimal;
} DclSolveInfo;

typedef struct {
  double mean;
  double variance;
} DclMoments;

typedef struct {
  double value;
  // Optimising MGF argument.
  double s_star;
  double gaussian_bound;
  bool bracket_capped;
  bool low_t;
} DclExponent;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *dcl_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *dcl_version(void);

// Create a single-channel configuration. `fading_rate` is ignored for
// log-normal fading; `attack_rate` 0 disables the attack.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle pointer.
DclStatus dcl_single_new(size_t k,
                         double rate,
                         double power,
                         DclFading fading,
                         double fading_rate,
                         double attack_rate,
                         DclSingleConfig **out);

// Release a handle from `dcl_single_new`. NULL is ignored.
//
// # Safety
// `cfg` must come from `dcl_single_new` and not be used afterwards.
void dcl_single_free(DclSingleConfig *cfg);

// Lower and upper outage bounds for uniform power.
//
// # Safety
// `cfg` must be a live handle; `lower` and `upper` must be writable.
DclStatus dcl_single_bounds(const DclSingleConfig *cfg, double *lower, double *upper);

// High-SNR outage approximation (independent Rayleigh, exponential attack).
//
// # Safety
// `cfg` must be a live handle; `out` must be writable.
DclStatus dcl_single_high_snr(const DclSingleConfig *cfg, double *out);

// Exact outage for a single block.
//
// # Safety
// `cfg` must be a live handle; `out` must be writable.
DclStatus dcl_single_exact_k1(const DclSingleConfig *cfg, double *out);

// Optimal coding length in the high-SNR regime; the handle's `K` is unused.
//
// # Safety
// `cfg` must be a live handle; `out` must be writable.
DclStatus dcl_single_optimal_k(const DclSingleConfig *cfg, DclOptimalK *out);

// Monte Carlo outage. `powers` may be NULL for uniform power, otherwise it
// holds `K` block powers averaging at most the configured power.
//
// # Safety
// `cfg` must be a live handle, `powers` NULL or readable for `K` values,
// `out` writable.
DclStatus dcl_single_mc(const DclSingleConfig *cfg,
                        const double *powers,
                        uint64_t trials,
                        uint64_t seed,
                        DclEstimate *out);

// Outage-minimising block powers. `powers` receives `K` values.
//
// # Safety
// `cfg` must be a live handle, `powers` writable for `len` values, `info`
// NULL or writable.
DclStatus dcl_single_optimize_power(const DclSingleConfig *cfg,
                                    DclProgram program,
                                    double *powers,
                                    size_t len,
                                    DclSolveInfo *info);

// Create a parallel configuration of `n` sub-channels sharing total power
// `power` and total rate `rate`. `m` 0 means independent attacks; otherwise
// neighbouring surviving-block counts within distance `m` have correlation
// `rho`.
//
// # Safety
// `out` must be writable.
DclStatus dcl_parallel_new(size_t n,
                           size_t k,
                           double power,
                           double rate,
                           size_t m,
                           double rho,
                           DclFading fading,
                           double fading_rate,
                           double attack_rate,
                           DclParallelConfig **out);

// Release a handle from `dcl_parallel_new`. NULL is ignored.
//
// # Safety
// `cfg` must come from `dcl_parallel_new` and not be used afterwards.
void dcl_parallel_free(DclParallelConfig *cfg);

// Mean and variance of the per-sub-channel throughput.
//
// # Safety
// `cfg` must be a live handle; `out` must be writable.
DclStatus dcl_parallel_moments(const DclParallelConfig *cfg, DclMoments *out);

// Gaussian approximation of the outage; uses the m-dependent variance when
// the handle has `m >= 1`.
//
// # Safety
// `cfg` must be a live handle; `out` must be writable.
DclStatus dcl_parallel_gaussian(const DclParallelConfig *cfg, double *out);

// Monte Carlo outage. With `m >= 1`, `realized_corr` (may be NULL)
// receives the measured neighbour correlation of surviving-block counts.
//
// # Safety
// `cfg` must be a live handle, `out` writable, `realized_corr` NULL or
// writable.
DclStatus dcl_parallel_mc(const DclParallelConfig *cfg,
                          uint64_t trials,
                          uint64_t seed,
                          DclEstimate *out,
                          double *realized_corr);

// Outage exponent at rate per unit cost `t`. Independent attacks use the
// large-deviations rate; `m >= 1` gives the Gaussian lower bound.
//
// # Safety
// `cfg` must be a live handle; `out` must be writable.
DclStatus dcl_parallel_exponent(const DclParallelConfig *cfg, double t, DclExponent *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYING_CHANNEL_H */
