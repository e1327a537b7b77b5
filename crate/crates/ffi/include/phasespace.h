#ifndef PHASESPACE_H
#define PHASESPACE_H

#include <stddef.h>
#include <stdint.h>

// Result codes of the C interface.
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  // Null pointer, bad UTF-8 or inconsistent lengths.
  PS_STATUS_INVALID_ARGUMENT = 1,
  // Malformed JSON or index text.
  PS_STATUS_PARSE = 2,
  PS_STATUS_INVALID_STATE = 3,
  PS_STATUS_INVALID_GRID = 4,
  // The computation itself failed (resolution guard, non-finite values).
  PS_STATUS_NUMERICAL = 5,
  PS_STATUS_UNSUPPORTED = 6,
  // A Rust panic was caught at the boundary.
  PS_STATUS_INTERNAL = 7,
} PsStatus;

// Complex samples of a phase-space function on a grid.
typedef struct PsFunction PsFunction;

// A uniform phase-space grid.
typedef struct PsGrid PsGrid;

// A reference wavefunction.
typedef struct PsPure PsPure;

// A density operator.
typedef struct PsState PsState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty if none. The pointer
// stays valid until the next failing call on the same thread.
const char *ps_last_error_message(void);

// Parses a mixed state from JSON text.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum PsStatus ps_state_from_json(const char *json, struct PsState **out);

// Built-in state by name; `k = 0` selects the default heavy-tail truncation.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum PsStatus ps_state_demo(const char *name, size_t k, struct PsState **out);

// Degrees of freedom `n`; 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
size_t ps_state_dim(const struct PsState *state);

// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum PsStatus ps_state_trace(const struct PsState *state, double *out);

// # Safety
// `state` must be null or a handle not yet freed.
void ps_state_free(struct PsState *state);

// Parses a reference wavefunction from JSON text.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum PsStatus ps_pure_from_json(const char *json, struct PsPure **out);

// The standard Gaussian in `n` degrees of freedom.
//
// # Safety
// `out` must be a valid pointer.
enum PsStatus ps_pure_vacuum(size_t n, struct PsPure **out);

// # Safety
// `pure` must be null or a handle not yet freed.
void ps_pure_free(struct PsPure *pure);

// Phase-space grid over `R^{2n}` with `points` nodes per axis on `[-L, L)`.
//
// # Safety
// `out` must be a valid pointer.
enum PsStatus ps_grid_new(size_t n, size_t points, double half_extent, struct PsGrid **out);

// Total number of nodes, `points^(2n)`; 0 for a null handle.
//
// # Safety
// `grid` must be null or a live handle.
size_t ps_grid_len(const struct PsGrid *grid);

// # Safety
// `grid` must be null or a handle not yet freed.
void ps_grid_free(struct PsGrid *grid);

// Wigner function sampled on `grid`.
//
// # Safety
// `state` and `grid` must be live handles and `out` a valid pointer.
enum PsStatus ps_wigner(const struct PsState *state,
                        const struct PsGrid *grid,
                        struct PsFunction **out);

// Husimi function against `chi`; a null `chi` selects the vacuum.
//
// # Safety
// `state` and `grid` must be live handles, `chi` null or live, `out` valid.
enum PsStatus ps_husimi(const struct PsState *state,
                        const struct PsPure *chi,
                        const struct PsGrid *grid,
                        struct PsFunction **out);

// Quasicharacteristic function sampled on `grid`.
//
// # Safety
// `state` and `grid` must be live handles and `out` a valid pointer.
enum PsStatus ps_quasichar(const struct PsState *state,
                           const struct PsGrid *grid,
                           struct PsFunction **out);

// Number of samples; 0 for a null handle.
//
// # Safety
// `f` must be null or a live handle.
size_t ps_function_len(const struct PsFunction *f);

// Copies the samples in row-major order into `re` and `im`, each of length
// `len`, which must equal [`ps_function_len`]. `im` may be null.
//
// # Safety
// `f` must be a live handle; `re` (and `im` unless null) must hold `len` doubles.
enum PsStatus ps_function_values(const struct PsFunction *f, double *re, double *im, size_t len);

// Riemann-sum integral over the grid.
//
// # Safety
// `f` must be a live handle; `re` and `im` valid pointers.
enum PsStatus ps_function_integral(const struct PsFunction *f, double *re, double *im);

// # Safety
// `f` must be null or a handle not yet freed.
void ps_function_free(struct PsFunction *f);

// Matrix element `<chi_alpha|rho|chi_beta>`; `alpha` and `beta` hold `len = 2n`
// coordinates `x.., p..`. A null `chi` selects the vacuum.
//
// # Safety
// Handles must be live or null as documented; arrays must hold `len` doubles.
enum PsStatus ps_matel(const struct PsState *state,
                       const struct PsPure *chi,
                       const double *alpha,
                       const double *beta,
                       size_t len,
                       double *re,
                       double *im);

// Weighted sup-seminorm `|F|_{a,b}` with `len`-entry multi-indices. A
// negative `band` selects the default interior band.
//
// # Safety
// `f` must be a live handle; `a` and `b` must hold `len` entries; `out` valid.
enum PsStatus ps_seminorm(const struct PsFunction *f,
                          const uint32_t *a,
                          const uint32_t *b,
                          size_t len,
                          double band,
                          double *out);

// Runs the verification suite on an `points`-per-axis grid of half extent
// `half_extent`. Writes 1 to `passed` when no check failed and, if `csv` is
// non-null, the report CSV as a string to be released with [`ps_string_free`].
//
// # Safety
// `state` must be live, `chi` null or live, `passed` valid, `csv` null or valid.
enum PsStatus ps_run_verify(const struct PsState *state,
                            const struct PsPure *chi,
                            size_t points,
                            double half_extent,
                            uint64_t seed,
                            int32_t *passed,
                            char **csv);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void ps_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHASESPACE_H */
