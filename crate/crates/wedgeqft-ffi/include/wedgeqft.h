#ifndef WEDGEQFT_H
#define WEDGEQFT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WqStatus {
  WQ_STATUS_OK = 0,
  WQ_STATUS_NULL_POINTER = 1,
  WQ_STATUS_INVALID_UTF8 = 2,
  WQ_STATUS_MODEL = 3,
  WQ_STATUS_POLE = 4,
  WQ_STATUS_DOMAIN = 5,
  WQ_STATUS_SHAPE = 6,
  WQ_STATUS_CAP = 7,
  WQ_STATUS_SUPPORT = 8,
  WQ_STATUS_OVERFLOW = 9,
  WQ_STATUS_NON_CONVERGENCE = 10,
  WQ_STATUS_CONFIG = 11,
  WQ_STATUS_IO = 12,
  WQ_STATUS_UNKNOWN_COMMAND = 13,
  WQ_STATUS_PANIC = 14,
} WqStatus;

/**
 * Opaque run configuration.
 */
typedef struct WqConfig WqConfig;

/**
 * Opaque two-particle scattering function.
 */
typedef struct WqModel WqModel;

/**
 * Library version as a static NUL-terminated string.
 */
const char *wq_version(void);

/**
 * Message of the last failed call on this thread, empty after a success.
 *
 * # Safety
 * The pointer stays valid until the next library call on the same thread and
 * must not be freed.
 */
const char *wq_last_error(void);

/**
 * Builds a scattering function from its sign, exponential factor, mass and
 * zeros `zeros_re[k] + i zeros_im[k]`. With `auto_mirror` each zero off the
 * imaginary axis gets its partner −conj(β) added.
 *
 * # Safety
 * `zeros_re` and `zeros_im` must point to `n_zeros` doubles each (they may be
 * null when `n_zeros` is 0). `out_model` must be a valid pointer; on success
 * it receives a handle to release with [`wq_model_free`].
 */
enum WqStatus wq_model_new(int epsilon,
                           double a,
                           double mass,
                           const double *zeros_re,
                           const double *zeros_im,
                           uintptr_t n_zeros,
                           bool auto_mirror,
                           struct WqModel **out_model);

/**
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void wq_model_free(struct WqModel *model);

/**
 * S₂ at the complex rapidity `re + i im`.
 *
 * # Safety
 * `model` must be a live handle; `out_re` and `out_im` must be valid pointers.
 */
enum WqStatus wq_model_evaluate(const struct WqModel *model,
                                double re,
                                double im,
                                double *out_re,
                                double *out_im);

/**
 * Width of the zero-free strip, capped at π/2.
 *
 * # Safety
 * `model` must be a live handle and `out_kappa` a valid pointer.
 */
enum WqStatus wq_model_kappa(const struct WqModel *model, double *out_kappa);

/**
 * Supremum of |S₂| over the strip 0 ≤ Im ζ ≤ `kappa`.
 *
 * # Safety
 * `model` must be a live handle and `out_norm` a valid pointer.
 */
enum WqStatus wq_model_strip_norm(const struct WqModel *model, double kappa, double *out_norm);

/**
 * Checks unitarity, reflection, crossing and hermitian analyticity on
 * `samples` real rapidities in [−window, window].
 *
 * # Safety
 * `model` must be a live handle; `out_max_residual` and `out_pass` must be
 * valid pointers.
 */
enum WqStatus wq_model_verify_relations(const struct WqModel *model,
                                        double window,
                                        uintptr_t samples,
                                        double tol,
                                        double *out_max_residual,
                                        bool *out_pass);

/**
 * Trace norm of the kernel e^{−a cosh x}/(x − y + i b). Refinement doubles
 * the window and node count until the relative change drops below 1e-3.
 *
 * # Safety
 * `out_value` and `out_converged` must be valid pointers.
 */
enum WqStatus wq_trace_norm_general(double a,
                                    double b,
                                    double half_width,
                                    uintptr_t nodes,
                                    bool refine,
                                    double *out_value,
                                    bool *out_converged);

/**
 * Smallest splitting distance s with σ(s)·‖T_s‖₁ < 1, by bisection with
 * absolute tolerance `tol`.
 *
 * # Safety
 * `model` must be a live handle and `out_s_min` a valid pointer.
 */
enum WqStatus wq_find_s_min(const struct WqModel *model,
                            double kappa,
                            double tol,
                            double *out_s_min);

/**
 * Parses a run configuration from text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out_config` must be a valid
 * pointer and receives a handle to release with [`wq_config_free`].
 */
enum WqStatus wq_config_parse(const char *text, struct WqConfig **out_config);

/**
 * Reads and parses a run configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out_config` must be a valid
 * pointer and receives a handle to release with [`wq_config_free`].
 */
enum WqStatus wq_config_load(const char *path, struct WqConfig **out_config);

/**
 * Overrides one tolerance, `name=value` as for `--tol-override`
 * (e.g. `"smatrix=1e-9"`).
 *
 * # Safety
 * `config` must be a live handle and `assignment` a NUL-terminated string.
 */
enum WqStatus wq_config_set_tolerance(struct WqConfig *config, const char *assignment);

/**
 * Replaces the run seed.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum WqStatus wq_config_set_seed(struct WqConfig *config, uint64_t seed);

/**
 * Builds the model described by the `[model]` section.
 *
 * # Safety
 * `config` must be a live handle; `out_model` must be a valid pointer and
 * receives a handle to release with [`wq_model_free`].
 */
enum WqStatus wq_config_model(const struct WqConfig *config, struct WqModel **out_model);

/**
 * # Safety
 * `config` must be null or a handle from this library not yet freed.
 */
void wq_config_free(struct WqConfig *config);

/**
 * Runs a command-line subcommand (`"verify-scattering"`, `"all"`, ...) and
 * returns its JSON report. `out_exit_code` receives the exit code the
 * command-line tool would use: 0 pass, 1 failure, 3 non-convergence only.
 *
 * # Safety
 * `config` must be a live handle and `command` a NUL-terminated string.
 * `out_exit_code` and `out_json` must be valid pointers; the string stored in
 * `out_json` must be released with [`wq_string_free`].
 */
enum WqStatus wq_run(const struct WqConfig *config,
                     const char *command,
                     bool parallel,
                     int *out_exit_code,
                     char **out_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void wq_string_free(char *s);

#endif  /* WEDGEQFT_H */
