#ifndef LANDSCAPE_LAB_H
#define LANDSCAPE_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LlStatus {
  LL_STATUS_OK = 0,
  LL_STATUS_INVALID_ARGUMENT = 1,
  LL_STATUS_NULL_POINTER = 2,
  LL_STATUS_SOLVER_FAILURE = 3,
  LL_STATUS_BUFFER_TOO_SMALL = 4,
  LL_STATUS_PANIC = 5,
} LlStatus;

// Opaque realized potential.
typedef struct LlPotential LlPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static nul-terminated string.
const char *ll_version(void);

// Copies the calling thread's last error message into `buf` (nul-terminated,
// truncated to `cap` bytes). Returns the full message length plus one, or 0
// when there is no message.
//
// # Safety
// `buf` must be null or point to `cap` writable bytes.
size_t ll_last_error_message(char *buf, size_t cap);

// Draws `len` cells from the law described by `dist` (for example
// `"bernoulli:0.5:40"`) with coupling `k`.
//
// # Safety
// `dist` must be a valid nul-terminated string and `out` a writable pointer.
enum LlStatus ll_potential_generate(const char *dist,
                                    size_t len,
                                    double k,
                                    uint64_t seed,
                                    struct LlPotential **out);

// Wraps explicit cell heights.
//
// # Safety
// `cells` must point to `len` readable values and `out` be writable.
enum LlStatus ll_potential_from_cells(const double *cells,
                                      size_t len,
                                      double k,
                                      struct LlPotential **out);

// # Safety
// `p` must be null or a handle from this library that has not been freed.
void ll_potential_free(struct LlPotential *p);

// Number of cells, or 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t ll_potential_len(const struct LlPotential *p);

// Copies the cell heights into `out`, which must hold `ll_potential_len(p)`.
//
// # Safety
// `p` must be a live handle and `out` point to `cap` writable values.
enum LlStatus ll_potential_cells(const struct LlPotential *p, double *out, size_t cap);

// Length of the longest zero well.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum LlStatus ll_potential_l_max(const struct LlPotential *p, size_t *out);

// The `n` smallest eigenvalues of the discretization with `m` subdivisions
// per cell, ascending.
//
// # Safety
// `p` must be a live handle and `out` point to `n` writable values.
enum LlStatus ll_lowest_eigenvalues(const struct LlPotential *p,
                                    size_t m,
                                    size_t n,
                                    double tol,
                                    double *out);

// Landscape function at the `L·m − 1` interior nodes. `u` may be null when
// only `u_max` is wanted.
//
// # Safety
// `p` must be a live handle, `u` null or pointing to `cap` writable values,
// and `u_max` writable.
enum LlStatus ll_landscape(const struct LlPotential *p,
                           size_t m,
                           double *u,
                           size_t cap,
                           double *u_max);

// `λ₁ / min W = λ₁ · max u` of the discretization.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum LlStatus ll_ground_ratio(const struct LlPotential *p, size_t m, double *out);

// The `n` smallest eigenvalues of the continuum operator.
//
// # Safety
// `p` must be a live handle and `out` point to `n` writable values.
enum LlStatus ll_continuum_eigenvalues(const struct LlPotential *p, size_t n, double *out);

// Maximum of the exact continuum landscape function.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum LlStatus ll_continuum_landscape_max(const struct LlPotential *p, double *out);

// Homogenized limits for `γ_c`: ground state `π² + γ_c`, landscape maximum
// and their product `R(γ_c)`.
//
// # Safety
// All three outputs must be writable.
enum LlStatus ll_homogenized(double gamma_c, double *lambda_c, double *u_c_max, double *ratio);

// `γ_c` with `R(γ_c) = r`, for `1 < r < π²/8`.
//
// # Safety
// `out` must be writable.
enum LlStatus ll_invert_ratio(double r, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LANDSCAPE_LAB_H */
