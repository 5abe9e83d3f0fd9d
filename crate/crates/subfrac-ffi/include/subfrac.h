#ifndef SUBFRAC_H
#define SUBFRAC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define SUBFRAC_OK 0

/**
 * Argument outside the mathematical domain (includes null pointers).
 */
#define SUBFRAC_ERR_DOMAIN 1

/**
 * No evaluation strategy certified the accuracy target.
 */
#define SUBFRAC_ERR_ACCURACY 2

/**
 * Sampling grid too coarse for the requested cutoff.
 */
#define SUBFRAC_ERR_GRID 3

/**
 * Malformed configuration file or i/o failure.
 */
#define SUBFRAC_ERR_CONFIG 4

/**
 * Solved field with the problem it came from, so verification can be
 * rerun against the original data.
 */
typedef struct SubfracField SubfracField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty string if
 * none. The pointer stays valid until the next library call from the
 * same thread.
 */
const char *subfrac_last_error(void);

/**
 * E_{rho,mu}(z) with a certified absolute error bound.
 *
 * `est_abs_error` may be null if the bound is not wanted.
 */
int32_t subfrac_ml(double rho, double mu, double z, double *value, double *est_abs_error);

/**
 * Relaxation kernel t^{rho-1} E_{rho,rho}(-lambda t^rho).
 */
int32_t subfrac_ml_kernel(double rho, double lambda, double t, double *value);

/**
 * Solve the problem described by a TOML configuration file and hand
 * back an owned field handle through `out`.
 */
int32_t subfrac_solve_config(const char *path, struct SubfracField **out);

/**
 * Spatial dimension of the field's basis.
 */
int32_t subfrac_dimension(const struct SubfracField *field);

/**
 * Number of enumerated modes.
 */
int32_t subfrac_mode_count(const struct SubfracField *field);

/**
 * Time horizon the field is valid on.
 */
double subfrac_horizon(const struct SubfracField *field);

/**
 * u(x, t) for t in (0, horizon]; `x` points at `dim` coordinates.
 */
int32_t subfrac_evaluate(const struct SubfracField *field,
                         const double *x,
                         uintptr_t dim,
                         double t,
                         double *out);

/**
 * t^{1-rho} u(x, t); t = 0 returns the weighted limit phi(x)/Gamma(rho).
 */
int32_t subfrac_weighted_evaluate(const struct SubfracField *field,
                                  const double *x,
                                  uintptr_t dim,
                                  double t,
                                  double *out);

/**
 * Run the verification suite against the field's own problem
 * description; writes 1 into `pass` when every gated check holds.
 */
int32_t subfrac_verify(const struct SubfracField *field, int32_t *pass);

/**
 * Release a field handle; null is a no-op.
 */
void subfrac_free(struct SubfracField *field);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBFRAC_H */
