#ifndef CMVERIFY_H
#define CMVERIFY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the first four match the command-line exit codes.
typedef enum CmvStatus {
  CMV_STATUS_OK = 0,
  // The check ran and found a mathematical violation.
  CMV_STATUS_VIOLATION = 1,
  // Bad argument or out-of-domain input.
  CMV_STATUS_USAGE = 2,
  // A tolerance, series or bracket could not be met.
  CMV_STATUS_NUMERIC = 3,
  CMV_STATUS_NULL_POINTER = 4,
  CMV_STATUS_INVALID_UTF8 = 5,
  CMV_STATUS_PANIC = 6,
} CmvStatus;

// Opaque evaluation context holding the working precision.
typedef struct CmvContext CmvContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a context working at `digits` significant digits (30..=200).
// Returns null on invalid `digits`; see [`cmv_last_error_message`].
struct CmvContext *cmv_context_new(uint32_t digits);

// # Safety
// `ctx` must be null or a pointer from [`cmv_context_new`] not yet freed.
void cmv_context_free(struct CmvContext *ctx);

// Digits of `ctx`, or 0 for a null context.
//
// # Safety
// `ctx` must be null or a live context.
uint32_t cmv_context_digits(const struct CmvContext *ctx);

// `psi^(n)(t)` for `n >= 1`, `t > 0`.
//
// # Safety
// `ctx` must be a live context and `out` valid for writes.
enum CmvStatus cmv_polygamma(const struct CmvContext *ctx, uint32_t n, double t, double *out);

// `h(t) = e^(1/t) - psi'(t)` for `i = 0`, otherwise its `i`-th derivative.
//
// # Safety
// `ctx` must be a live context and `out` valid for writes.
enum CmvStatus cmv_h(const struct CmvContext *ctx, uint32_t i, double t, double *out);

// Remainder `H_k(z) = e^(1/z) - sum_{m<=k} z^-m / m!` for `z > 0`.
//
// # Safety
// `ctx` must be a live context and `out` valid for writes.
enum CmvStatus cmv_remainder_hk(const struct CmvContext *ctx, uint32_t k, double z, double *out);

// Modified Bessel function `I_nu(z)` for integer `nu` and `z >= 0`.
//
// # Safety
// `ctx` must be a live context and `out` valid for writes.
enum CmvStatus cmv_bessel_i(const struct CmvContext *ctx, uint32_t nu, double z, double *out);

// Margin of `I_1(t) > (t/2)^3 / (1 - e^(-(t/2)^2))` at `t > 0`.
// Returns `CMV_STATUS_VIOLATION` if the margin is not above the noise floor.
//
// # Safety
// `ctx` must be a live context and `out` valid for writes.
enum CmvStatus cmv_bessel_margin(const struct CmvContext *ctx, double t, double *out);

// Brackets the completely monotonic degree of `H_k` with default search settings.
// Returns `CMV_STATUS_VIOLATION` if the bracket misses `k + 1`.
//
// # Safety
// `ctx` must be a live context; `r_lo` and `r_hi` valid for writes.
enum CmvStatus cmv_degree(const struct CmvContext *ctx, uint32_t k, double *r_lo, double *r_hi);

// Evaluates a named function at the decimal point `t` and returns the value
// as a decimal string with the context's digits. `function` is one of the
// `eval --fn` names of the command-line tool; `param` fills `k`, `n` or `i`
// as that function requires.
//
// # Safety
// `ctx` must be a live context, `function` and `t` NUL-terminated strings,
// and `out` valid for one pointer write. Free `*out` with [`cmv_string_free`].
enum CmvStatus cmv_eval_decimal(const struct CmvContext *ctx,
                                const char *function,
                                const char *t,
                                uint32_t param,
                                char **out);

// Runs the command-line tool in-process. `argv` excludes the program name.
// `*report` receives the report text (or the diagnostic on usage errors);
// `*exit_code` receives the tool's exit code, also reflected in the status.
//
// # Safety
// `argv` must point to `argc` NUL-terminated strings; `report` and
// `exit_code` must be valid for writes. Free `*report` with [`cmv_string_free`].
enum CmvStatus cmv_run(size_t argc, const char *const *argv, char **report, int32_t *exit_code);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void cmv_string_free(char *s);

// Message for the last failing call on this thread, or null.
// The pointer stays valid until the next call into the library on this thread.
const char *cmv_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CMVERIFY_H */
