#ifndef PARAKKT_PARAKKT_H
#define PARAKKT_PARAKKT_H

/*
 * C interface of the parakkt library: optimal control of semilinear parabolic
 * equations with mixed pointwise constraints g(x, t, y, u) <= 0.
 *
 * Every function returning pk_status leaves a description of the failure in
 * pk_last_error() (per thread). Strings returned through char** are owned by
 * the caller and released with pk_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(PARAKKT_BUILDING_LIBRARY)
#define PK_API __attribute__((visibility("default")))
#else
#define PK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pk_status {
    PK_OK = 0,
    PK_ERROR_INTERNAL = 1,
    PK_ERROR_CONFIG = 2,
    PK_ERROR_HYPOTHESIS = 3,
    PK_ERROR_SOLVER = 4,
    PK_ERROR_IO = 5
} pk_status;

typedef struct pk_problem pk_problem;
typedef struct pk_session pk_session;

PK_API const char* pk_version(void);
PK_API const char* pk_status_name(pk_status status);
PK_API const char* pk_last_error(void);
PK_API void pk_string_free(char* s);

/* ---- problems --------------------------------------------------------- */

/* Newline-separated catalog names. */
PK_API pk_status pk_catalog_names(char** out);

PK_API pk_status pk_problem_from_catalog(const char* name, pk_problem** out);
PK_API pk_status pk_problem_from_file(const char* path, pk_problem** out);
PK_API pk_status pk_problem_from_text(const char* text, pk_problem** out);
/* Catalog name if it is one, otherwise a problem-file path. */
PK_API pk_status pk_problem_resolve(const char* name_or_path, pk_problem** out);
PK_API void pk_problem_destroy(pk_problem* problem);

PK_API int pk_problem_dim(const pk_problem* problem);
/* Canonical problem-file text. */
PK_API pk_status pk_problem_source(const pk_problem* problem, char** out);

/* Hypothesis audit on n_samples Halton points of the problem's audit box
 * plus a derivative cross-check; report is a key-value block, all_pass is
 * set to 1 when every hypothesis and the derivative check pass. */
PK_API pk_status pk_problem_validate(const pk_problem* problem, size_t n_samples, uint64_t seed,
                                     char** report, int* all_pass);

/* ---- sessions: a problem on a grid ------------------------------------ */

typedef struct pk_grid_options {
    int nodes[2]; /* nodes per axis including the boundary; nodes[1] unused in 1D */
    int levels;   /* time levels, >= 2 */
} pk_grid_options;

PK_API pk_status pk_session_create(const pk_problem* problem, const pk_grid_options* grid,
                                   pk_session** out);
PK_API void pk_session_destroy(pk_session* session);

/* Number of values of one field (interior nodes times levels). */
PK_API size_t pk_session_field_size(const pk_session* session);

typedef struct pk_solve_options {
    int max_outer;  /* <= 0 selects the default (200) */
    double tol_kkt; /* <= 0 selects the default (1e-8) */
} pk_solve_options;

/* Computes a KKT point. report receives the summary and residual blocks as
 * "== SECTION <name> ==" sections, trace_csv the iteration table; either may
 * be NULL. converged is set to 0 when the residuals miss the tolerance. */
PK_API pk_status pk_session_solve(pk_session* session, const pk_solve_options* options,
                                  char** report, char** trace_csv, int* converged);

/* Field names: "y", "u", "phi", "e". */
PK_API pk_status pk_session_get_field(const pk_session* session, const char* name, double* out,
                                      size_t n);
PK_API pk_status pk_session_set_field(pk_session* session, const char* name, const double* values,
                                      size_t n);

/* y.field, u.field, phi.field, e.field in dir. */
PK_API pk_status pk_session_write_fields(const pk_session* session, const char* dir);
PK_API pk_status pk_session_read_fields(pk_session* session, const char* dir);

/* Residual key-value block for the current fields. */
PK_API pk_status pk_session_check_kkt(const pk_session* session, char** report);

/* Legendre minimum, a critical-direction sample with its quadratic form and
 * the quadratic-growth probe; growth_csv receives the trial table. */
PK_API pk_status pk_session_soc(pk_session* session, uint64_t seed, int n_trials, double radius,
                                char** report, char** growth_csv);

/* Hoelder fits of y, u, phi, e and g_u e. */
PK_API pk_status pk_session_holder(pk_session* session, size_t n_pairs, uint64_t seed,
                                   char** report);
/* Bin table of the last holder run for "y", "u", "phi", "e" or "gu_e". */
PK_API pk_status pk_session_holder_table(const pk_session* session, const char* name, char** csv);

/* Solves the dense discrete program and compares its multipliers with the
 * current KKT point (computed first if absent). */
PK_API pk_status pk_session_oracle_compare(pk_session* session, char** report);

/* KKT fields plus g, the constraint boundary, the h-potential and both
 * multiplier formulas, one field file each. */
PK_API pk_status pk_session_export_fields(pk_session* session, const char* dir);

#ifdef __cplusplus
}
#endif

#endif
