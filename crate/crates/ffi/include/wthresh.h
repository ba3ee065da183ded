#ifndef WTHRESH_H
#define WTHRESH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Status codes. Nonzero values match the process exit codes of the CLI.
 */
enum WthStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  WTH_STATUS_OK = 0,
  /*
   A Rust panic was caught at the boundary.
   */
  WTH_STATUS_INTERNAL = 1,
  /*
   Invalid argument, including null pointers and failed searches or fits.
   */
  WTH_STATUS_PARAM = 2,
  WTH_STATUS_FORMAT = 3,
  /*
   The window/lattice pair is not a frame.
   */
  WTH_STATUS_FRAME = 4,
  WTH_STATUS_IO = 5,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum WthStatus WthStatus;
#else
typedef int32_t WthStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/*
 A painless Gabor system (window, hop, channels, signal length).
 */
typedef struct WthGabor WthGabor;

/*
 An `M x N` complex coefficient grid.
 */
typedef struct WthGrid WthGrid;

/*
 A 2-D neighbourhood weight stencil.
 */
typedef struct WthStencil WthStencil;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length excluding the NUL.
 */
size_t wth_last_error(char *buf, size_t len);

/*
 Gabor system with a unit-norm periodic Hann window.
 */
WthStatus wth_gabor_new_hann(size_t window_length,
                             size_t hop,
                             size_t channels,
                             size_t signal_length,
                             struct WthGabor **out);

/*
 Gabor system with a caller-supplied real window.
 */
WthStatus wth_gabor_new(const double *window,
                        size_t window_length,
                        size_t hop,
                        size_t channels,
                        size_t signal_length,
                        struct WthGabor **out);

void wth_gabor_free(struct WthGabor *sys);

/*
 Number of frames `N = L / a`; 0 for a null handle.
 */
size_t wth_gabor_frames(const struct WthGabor *sys);

/*
 Number of coefficients `M * N`; 0 for a null handle.
 */
size_t wth_gabor_coefficient_count(const struct WthGabor *sys);

WthStatus wth_gabor_frame_bounds(const struct WthGabor *sys, double *lower, double *upper);

/*
 Canonical coefficients of a real signal of exactly `signal_length` samples.
 */
WthStatus wth_gabor_analyze(const struct WthGabor *sys,
                            const double *signal,
                            size_t len,
                            struct WthGrid **out);

/*
 Real part of the synthesis with the system window, written to `out[0..len]`.
 */
WthStatus wth_gabor_synthesize(const struct WthGabor *sys,
                               const struct WthGrid *grid,
                               double *out,
                               size_t len);

/*
 Grid from `2 * channels * frames` interleaved doubles.
 */
WthStatus wth_grid_new(size_t channels,
                       size_t frames,
                       const double *interleaved,
                       size_t len,
                       struct WthGrid **out);

void wth_grid_free(struct WthGrid *grid);

size_t wth_grid_channels(const struct WthGrid *grid);

size_t wth_grid_frames(const struct WthGrid *grid);

size_t wth_grid_nonzeros(const struct WthGrid *grid);

/*
 Copies the coefficients as interleaved doubles; `len` must be `2 * M * N`.
 */
WthStatus wth_grid_copy(const struct WthGrid *grid, double *out, size_t len);

/*
 Stencil from a preset name (`identity`, `weight1`, `weight2`, `weight3`,
 `extreme-horizontal`) or a tap list `"dm:dn:w,dm:dn:w,..."`.
 */
WthStatus wth_stencil_parse(const char *spec, struct WthStencil **out);

void wth_stencil_free(struct WthStencil *stencil);

/*
 Keeps the `m` largest-magnitude coefficients, zeroing the rest.
 */
WthStatus wth_greedy_mterm(const struct WthGrid *grid, size_t m, struct WthGrid **out);

/*
 Keeps the coefficients at the `m` positions of largest weighted magnitude.
 */
WthStatus wth_weighted_mterm(const struct WthGrid *grid,
                             const struct WthStencil *stencil,
                             size_t m,
                             struct WthGrid **out);

/*
 Windowed group lasso. A null `neighborhood` selects the default
 `{(0,0): 1, (0,1): 0.5, (0,2): 0.25}`.
 */
WthStatus wth_wgl_denoise(const struct WthGrid *grid,
                          const struct WthStencil *neighborhood,
                          double threshold,
                          uint32_t iterations,
                          double step,
                          struct WthGrid **out);

/*
 Searches the WGL threshold leaving `target` nonzeros (within 1%).
 */
WthStatus wth_wgl_match_sparsity(const struct WthGrid *grid,
                                 const struct WthStencil *neighborhood,
                                 uint32_t iterations,
                                 double step,
                                 size_t target,
                                 struct WthGrid **out,
                                 double *threshold);

/*
 Lorentz quasi-norm of `len` interleaved complex values; pass `q = INFINITY`
 for the weak-type (supremum) variant.
 */
WthStatus wth_lorentz_norm(const double *interleaved,
                           size_t len,
                           double tau,
                           double q,
                           double *out);

/*
 Relative error `||reference - reconstruction|| / ||reference||`.
 */
WthStatus wth_rms(const double *reference, const double *reconstruction, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WTHRESH_H */
