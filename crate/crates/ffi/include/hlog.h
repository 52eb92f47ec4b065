#ifndef HLOG_H
#define HLOG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HlogShift {
  /**
   * Arcs starting at multiples of `2 pi 2^-k`
   */
  HLOG_SHIFT_ZERO = 0,
  /**
   * The same arcs translated by `2 pi / 3`
   */
  HLOG_SHIFT_THIRD = 1,
} HlogShift;

typedef enum HlogStatus {
  HLOG_STATUS_OK = 0,
  HLOG_STATUS_NULL_POINTER = 1,
  HLOG_STATUS_INVALID_ARGUMENT = 2,
  HLOG_STATUS_NUMERICAL = 3,
  HLOG_STATUS_INTERNAL = 4,
} HlogStatus;

/**
 * Haar expansion in one of the two dyadic systems.
 */
typedef struct HlogCoefficients HlogCoefficients;

/**
 * Mean plus atoms produced by the stopping-time decomposition.
 */
typedef struct HlogDecomposition HlogDecomposition;

/**
 * Function on a torus grid of `3 * 2^N` cells.
 */
typedef struct HlogGrid HlogGrid;

/**
 * Copies the message of the last failure on this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length in bytes, without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
uintptr_t hlog_last_error(char *buf, uintptr_t len);

/**
 * `t / log(e + t)`.
 */
double hlog_psi0(double t);

/**
 * Builds a torus grid from `n` samples; `n` must be `3 * 2^N`.
 *
 * # Safety
 * `re` must point to `n` doubles, `im` must be null or point to `n` doubles, and
 * `out` must be a valid pointer to a handle slot.
 */
enum HlogStatus hlog_grid_new(const double *re,
                              const double *im,
                              uintptr_t n,
                              struct HlogGrid **out);

/**
 * Number of cells, or 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
uintptr_t hlog_grid_len(const struct HlogGrid *grid);

/**
 * Copies the samples into `re` and, when non-null, `im`; `n` must equal the grid length.
 *
 * # Safety
 * `grid` must be a live handle; `re` (and `im` if non-null) must point to `n` writable doubles.
 */
enum HlogStatus hlog_grid_samples(const struct HlogGrid *grid, double *re, double *im, uintptr_t n);

/**
 * # Safety
 * `grid` must be null or a handle not yet freed.
 */
void hlog_grid_free(struct HlogGrid *grid);

/**
 * Haar coefficients of `grid` in the system `shift`.
 *
 * # Safety
 * `grid` must be a live handle and `out` a valid handle slot.
 */
enum HlogStatus hlog_analyze(const struct HlogGrid *grid,
                             enum HlogShift shift,
                             struct HlogCoefficients **out);

/**
 * Inverse of [`hlog_analyze`].
 *
 * # Safety
 * `coeffs` must be a live handle and `out` a valid handle slot.
 */
enum HlogStatus hlog_synthesize(const struct HlogCoefficients *coeffs, struct HlogGrid **out);

/**
 * Square function of the expansion, one value per cell.
 *
 * # Safety
 * `coeffs` must be a live handle and `out` a valid handle slot.
 */
enum HlogStatus hlog_square_function(const struct HlogCoefficients *coeffs, struct HlogGrid **out);

/**
 * Luxemburg norm of the square function under `psi0`, normalised by `2 pi`.
 *
 * # Safety
 * `coeffs` must be a live handle and `out` must point to a writable double.
 */
enum HlogStatus hlog_dyadic_quasinorm(const struct HlogCoefficients *coeffs, double *out);

/**
 * # Safety
 * `coeffs` must be null or a handle not yet freed.
 */
void hlog_coefficients_free(struct HlogCoefficients *coeffs);

/**
 * Luxemburg norm of `grid` under `psi0` with the normalised measure `d theta / 2 pi`.
 *
 * # Safety
 * `grid` must be a live handle and `out` must point to a writable double.
 */
enum HlogStatus hlog_luxemburg_psi0(const struct HlogGrid *grid, double *out);

/**
 * Centred Hardy-Littlewood maximal function on the circle.
 *
 * # Safety
 * `grid` must be a live handle and `out` a valid handle slot.
 */
enum HlogStatus hlog_maximal(const struct HlogGrid *grid, struct HlogGrid **out);

/**
 * Atomic decomposition of `grid` along the system `shift`.
 *
 * # Safety
 * `grid` must be a live handle and `out` a valid handle slot.
 */
enum HlogStatus hlog_atomic_decompose(const struct HlogGrid *grid,
                                      enum HlogShift shift,
                                      struct HlogDecomposition **out);

/**
 * Number of atoms, or 0 for a null handle.
 *
 * # Safety
 * `dec` must be null or a live handle.
 */
uintptr_t hlog_decomposition_atom_count(const struct HlogDecomposition *dec);

/**
 * Luxemburg-type size of the decomposition: mean plus the `psi0` mass of its atoms.
 *
 * # Safety
 * `dec` must be a live handle and `out` must point to a writable double.
 */
enum HlogStatus hlog_decomposition_lambda_inf(const struct HlogDecomposition *dec, double *out);

/**
 * Mean plus the sum of the atoms.
 *
 * # Safety
 * `dec` must be a live handle and `out` a valid handle slot.
 */
enum HlogStatus hlog_decomposition_reconstruct(const struct HlogDecomposition *dec,
                                               struct HlogGrid **out);

/**
 * # Safety
 * `dec` must be null or a handle not yet freed.
 */
void hlog_decomposition_free(struct HlogDecomposition *dec);

#endif  /* HLOG_H */
