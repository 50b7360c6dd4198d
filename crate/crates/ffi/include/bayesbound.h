#ifndef BAYESBOUND_H
#define BAYESBOUND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BbStatus {
  BB_STATUS_OK = 0,
  BB_STATUS_NULL_POINTER = 1,
  BB_STATUS_INVALID_ARGUMENT = 2,
  BB_STATUS_DIMENSION_MISMATCH = 3,
  BB_STATUS_PRECONDITION = 4,
  BB_STATUS_NOT_POSITIVE_DEFINITE = 5,
  BB_STATUS_UNSUPPORTED = 6,
  BB_STATUS_INVALID_UTF8 = 7,
  BB_STATUS_PANIC = 8,
} BbStatus;

/**
 * Opaque convex generator handle.
 */
typedef struct BbGenerator BbGenerator;

/**
 * Opaque finite decision problem handle.
 */
typedef struct BbProblem BbProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *bb_last_error_message(void);

/**
 * Power generator `f_α`; `α = 1` is KL, `2` is χ², `1/2` is Hellinger.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BbStatus bb_generator_power(double alpha, struct BbGenerator **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum BbStatus bb_generator_tv(struct BbGenerator **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum BbStatus bb_generator_tsybakov(double s, struct BbGenerator **out);

/**
 * # Safety
 * `g` must come from a `bb_generator_*` constructor (or be null) and not be
 * used afterwards.
 */
void bb_generator_free(struct BbGenerator *g);

/**
 * `D_f(p || q)` for probability vectors of length `len`.
 *
 * # Safety
 * `p` and `q` must point to `len` doubles; `out` must be valid.
 */
enum BbStatus bb_f_divergence(const struct BbGenerator *g,
                              const double *p,
                              const double *q,
                              uintptr_t len,
                              double *out);

/**
 * `φ_f(a, b)`, the divergence between Bernoulli(a) and Bernoulli(b).
 *
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum BbStatus bb_phi(const struct BbGenerator *g, double a, double b, double *out);

/**
 * Smallest `r ≤ r0` with `φ_f(r, r0) ≤ informativity`.
 *
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum BbStatus bb_invert_phi(const struct BbGenerator *g,
                            double informativity,
                            double r0,
                            double *out);

/**
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum BbStatus bb_u_f(const struct BbGenerator *g, double x, double *out);

/**
 * Builds a finite problem from row-major matrices: `channel` is
 * `n_params × n_obs`, `prior` has `n_params` entries and `loss` is
 * `n_params × n_actions`. A null `loss` means zero-one loss with
 * `n_actions = n_params`.
 *
 * # Safety
 * Pointers must reference arrays of the stated sizes; `out` must be valid.
 */
enum BbStatus bb_problem_new(const double *channel,
                             uintptr_t n_params,
                             uintptr_t n_obs,
                             const double *prior,
                             const double *loss,
                             uintptr_t n_actions,
                             struct BbProblem **out);

/**
 * # Safety
 * `p` must come from `bb_problem_new` (or be null) and not be used afterwards.
 */
void bb_problem_free(struct BbProblem *p);

/**
 * # Safety
 * `p` must be a live handle and `out` valid.
 */
enum BbStatus bb_exact_bayes_risk(const struct BbProblem *p, double *out);

/**
 * # Safety
 * `p` must be a live handle and `out` valid.
 */
enum BbStatus bb_mutual_information(const struct BbProblem *p, double *out);

/**
 * # Safety
 * `p` must be a live handle and `out` valid.
 */
enum BbStatus bb_chi2_informativity(const struct BbProblem *p, double *out);

/**
 * # Safety
 * `p` must be a live handle and `out` valid.
 */
enum BbStatus bb_hellinger_informativity(const struct BbProblem *p, double *out);

/**
 * No-data Bayes risk of a zero-one problem.
 *
 * # Safety
 * `p` must be a live handle and `out` valid.
 */
enum BbStatus bb_r0(const struct BbProblem *p, double *out);

/**
 * Generalized Fano bound from a mutual-information upper bound; pass the
 * problem to take `r0` and the zero-ball mass from it.
 *
 * # Safety
 * `p` must be a live handle and `out` valid.
 */
enum BbStatus bb_generalized_fano(const struct BbProblem *p, double informativity, double *out);

/**
 * Runs a JSON config and returns the JSON report in `out_json` (release
 * with [`bb_string_free`]) and the dominance status (0 pass, 1 fail) in
 * `out_exit`. Config errors return `InvalidArgument`.
 *
 * # Safety
 * `config` must be a NUL-terminated string; out pointers must be valid.
 */
enum BbStatus bb_run_config_json(const char *config, char **out_json, int32_t *out_exit);

/**
 * # Safety
 * `s` must come from this library (or be null) and not be used afterwards.
 */
void bb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BAYESBOUND_H */
