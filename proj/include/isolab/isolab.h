#ifndef ISOLAB_H
#define ISOLAB_H

#include <stddef.h>

#if defined(ISOLAB_BUILDING)
#define ISOLAB_API __attribute__((visibility("default")))
#else
#define ISOLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum isolab_status {
    ISOLAB_OK = 0,
    ISOLAB_ERR_DOMAIN = 1,
    ISOLAB_ERR_POLE = 2,
    ISOLAB_ERR_DEGENERATE = 3,
    ISOLAB_ERR_SINGULARITY = 4,
    ISOLAB_ERR_BUDGET = 5,
    ISOLAB_ERR_ACCURACY = 6,
    ISOLAB_ERR_SCALING = 7,
    ISOLAB_ERR_CONFIG = 8,
    ISOLAB_ERR_INVALID_ARGUMENT = 9,
    ISOLAB_ERR_INTERNAL = 10
} isolab_status;

typedef struct isolab_complex {
    double re;
    double im;
} isolab_complex;

/* theta = (theta1, theta2, theta3, theta_inf); y ~ J x^(1 - sigma) at x = 0. */
typedef struct isolab_pvi_data {
    isolab_complex theta[4];
    isolab_complex sigma;
    isolab_complex J;
} isolab_pvi_data;

typedef struct isolab_monodromy {
    isolab_complex p12, p13, p23;
    isolab_complex p1, p2, p3, pinf;
} isolab_monodromy;

/* Opaque handles. A context holds the last error message and options. */
typedef struct isolab_context isolab_context;
typedef struct isolab_matrix isolab_matrix;

ISOLAB_API const char* isolab_version(void);
ISOLAB_API const char* isolab_status_name(isolab_status s);

ISOLAB_API isolab_status isolab_context_create(isolab_context** out);
ISOLAB_API void isolab_context_destroy(isolab_context* ctx);
/* Message of the last failed call on ctx; valid until the next call. */
ISOLAB_API const char* isolab_last_error(const isolab_context* ctx);
/* Nonzero (default) enforces the genericity conditions in the arrows. */
ISOLAB_API isolab_status isolab_set_require_generic(isolab_context* ctx, int flag);

ISOLAB_API isolab_status isolab_matrix_create(size_t n, isolab_matrix** out);
ISOLAB_API void isolab_matrix_destroy(isolab_matrix* m);
ISOLAB_API size_t isolab_matrix_dim(const isolab_matrix* m);
/* 0-based indices. */
ISOLAB_API isolab_status isolab_matrix_get(const isolab_matrix* m, size_t i, size_t j, isolab_complex* out);
ISOLAB_API isolab_status isolab_matrix_set(isolab_matrix* m, size_t i, size_t j, isolab_complex v);

/* Boundary value Phi_0 (3x3, gauge-fixed) from asymptotic data. *out is newly allocated. */
ISOLAB_API isolab_status isolab_arrow_q(isolab_context* ctx, const isolab_pvi_data* d, isolab_matrix** out);
/* Inverse; theta_inf_hint may be NULL (then Re theta_inf >= 0 is used). */
ISOLAB_API isolab_status isolab_arrow_q_inverse(isolab_context* ctx, const isolab_matrix* phi0,
                                                const isolab_complex* theta_inf_hint, isolab_pvi_data* out);
/* Stokes matrices from Phi_0. Both outputs newly allocated. */
ISOLAB_API isolab_status isolab_arrow_g(isolab_context* ctx, const isolab_matrix* phi0, isolab_matrix** s_plus,
                                        isolab_matrix** s_minus);
/* Monodromy parameters from Stokes matrices; theta holds theta1..theta3, theta_inf. */
ISOLAB_API isolab_status isolab_arrow_p(isolab_context* ctx, const isolab_matrix* s_plus, const isolab_matrix* s_minus,
                                        const isolab_complex theta[4], isolab_monodromy* out);
/* Connection formula: (sigma, J) from monodromy data. */
ISOLAB_API isolab_status isolab_arrow_f(isolab_context* ctx, const isolab_monodromy* m, const isolab_complex theta[4],
                                        isolab_pvi_data* out);
ISOLAB_API isolab_status isolab_cubic_residual(isolab_context* ctx, const isolab_monodromy* m, double* out);

/* Numerical Stokes matrices of dF/dz = (diag(u) + Phi/z) F, u purely imaginary
 * with increasing imaginary parts. R <= 0 selects the default. */
ISOLAB_API isolab_status isolab_stokes_numeric(isolab_context* ctx, const isolab_complex* u, const isolab_matrix* phi,
                                               double R, isolab_matrix** s_plus, isolab_matrix** s_minus,
                                               double* triangular_residual);

/* Runs a harness command ("roundtrip", "limits", "stokes", "jmms", "convert")
 * with a JSON config. *report_json receives the JSON report, *csv the sidecar
 * table (possibly empty); free both with isolab_string_free. *exit_code is 0
 * on success, 1 if a threshold was exceeded, 2 on a reported error. csv and
 * exit_code may be NULL. */
ISOLAB_API isolab_status isolab_run(isolab_context* ctx, const char* command, const char* config_json,
                                    char** report_json, char** csv, int* exit_code);
ISOLAB_API void isolab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* ISOLAB_H */
