#ifndef PTCHAIN_H
#define PTCHAIN_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PtStatus {
  PT_STATUS_OK = 0,
  PT_STATUS_NULL_POINTER = 1,
  PT_STATUS_INVALID_PARAMETER = 2,
  PT_STATUS_OUT_OF_RANGE = 3,
  PT_STATUS_SINGULAR_BASIS = 4,
  PT_STATUS_SPECTRAL_SINGULARITY = 5,
  PT_STATUS_MISSED_ROOTS = 6,
  PT_STATUS_NON_CONVERGENCE = 7,
  PT_STATUS_BRANCH_LOST = 8,
  PT_STATUS_DECOMPOSITION_FAILED = 9,
  PT_STATUS_INSUFFICIENT_GROWTH = 10,
  PT_STATUS_INDEX_OUT_OF_BOUNDS = 11,
  PT_STATUS_PANIC = 99,
} PtStatus;

typedef enum PtRegime {
  PT_REGIME_RELEVANT = 0,
  PT_REGIME_CRITICAL_SINGULARITY = 1,
  PT_REGIME_UNPHYSICAL = 2,
} PtRegime;

typedef enum PtPoleClass {
  PT_POLE_CLASS_TGBS = 0,
  PT_POLE_CLASS_DECAYING_BOUND = 1,
  PT_POLE_CLASS_LASING_SINGULARITY = 2,
  PT_POLE_CLASS_ABSORBING_SINGULARITY = 3,
  PT_POLE_CLASS_RESONANCE = 4,
} PtPoleClass;

/**
 * Poles found in one search.
 */
typedef struct PtPoleSet PtPoleSet;

/**
 * A diagonalized finite lattice ready for time evolution.
 */
typedef struct PtPropagator PtPropagator;

typedef struct PtScatter {
  double k;
  double energy;
  double t_re;
  double t_im;
  double transmission;
  double reflection_left;
  double reflection_right;
} PtScatter;

typedef struct PtVerdict {
  enum PtRegime regime;
  double gamma_critical;
  size_t tgbs_count;
  double margin;
} PtVerdict;

typedef struct PtPole {
  double k_re;
  double k_im;
  double energy_re;
  double energy_im;
  double growth_rate;
  double residual;
  enum PtPoleClass kind;
} PtPole;

typedef struct PtIntensitySplit {
  double reflected;
  double central;
  double transmitted;
} PtIntensitySplit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *pt_last_error(void);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PtStatus pt_gamma_critical(size_t n_cells, double *out);

/**
 * Stationary scattering at real wavenumber `k` in `(0, pi)`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PtStatus pt_scatter(size_t n_cells, double gamma, double k, struct PtScatter *out);

/**
 * `M22` at complex `k`; its zeros are the poles.
 *
 * # Safety
 * `out_re` and `out_im` must be null or valid for writes.
 */
enum PtStatus pt_pole_residual(size_t n_cells,
                               double gamma,
                               double k_re,
                               double k_im,
                               double *out_re,
                               double *out_im);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PtStatus pt_verdict(size_t n_cells, double gamma, struct PtVerdict *out);

/**
 * Find every pole in the rectangle. Free the result with [`pt_poles_free`].
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PtStatus pt_poles_find(size_t n_cells,
                            double gamma,
                            double re_min,
                            double re_max,
                            double im_min,
                            double im_max,
                            size_t grid_density,
                            struct PtPoleSet **out);

/**
 * Number of poles in the set; 0 for null.
 *
 * # Safety
 * `set` must be null or a live handle from [`pt_poles_find`].
 */
size_t pt_poles_len(const struct PtPoleSet *set);

/**
 * # Safety
 * `set` must be null or a live handle; `out` null or valid for writes.
 */
enum PtStatus pt_poles_get(const struct PtPoleSet *set, size_t index, struct PtPole *out);

/**
 * # Safety
 * `set` must be null or a handle from [`pt_poles_find`] not yet freed.
 */
void pt_poles_free(struct PtPoleSet *set);

/**
 * Diagonalize a lattice of `total_sites` with the chain centered.
 * Free the result with [`pt_propagator_free`].
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PtStatus pt_propagator_new(size_t n_cells,
                                double gamma,
                                size_t total_sites,
                                struct PtPropagator **out);

/**
 * Eigenvalue with the largest imaginary part.
 *
 * # Safety
 * `prop` must be null or a live handle; outputs null or valid for writes.
 */
enum PtStatus pt_propagator_dominant(const struct PtPropagator *prop,
                                     double *out_re,
                                     double *out_im);

/**
 * Evolve a Gaussian packet centered at `j0` (relative to the first chain
 * site) to time `t`. Writes `|psi_j|^2` for every site into `intensities`
 * when it is non-null and `len` covers the lattice, and the region split
 * into `split` when non-null.
 *
 * # Safety
 * `prop` must be null or a live handle. `intensities` must be null or
 * valid for `len` writes; `split` null or valid for writes.
 */
enum PtStatus pt_propagator_evolve_packet(const struct PtPropagator *prop,
                                          int64_t j0,
                                          double sigma,
                                          double k0,
                                          double t,
                                          double *intensities,
                                          size_t len,
                                          struct PtIntensitySplit *split);

/**
 * Total lattice sites; 0 for null.
 *
 * # Safety
 * `prop` must be null or a live handle from [`pt_propagator_new`].
 */
size_t pt_propagator_sites(const struct PtPropagator *prop);

/**
 * # Safety
 * `prop` must be null or a handle from [`pt_propagator_new`] not yet freed.
 */
void pt_propagator_free(struct PtPropagator *prop);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PTCHAIN_H */
