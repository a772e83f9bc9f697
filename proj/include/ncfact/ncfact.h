/* Part of the ncfact project, under the Apache License v2.0.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the ncfact library: exact algebra on matrix-valued *-polynomials
 * in free unitary generators, constructive factorization into scalar-matrix /
 * block-diagonal degree-1 chains, norm evaluation under concrete unitary
 * representations, chain balancing, and the norm-transfer harness.
 *
 * Conventions:
 *   - Objects are opaque handles created and destroyed by this library.
 *   - Every fallible call returns an ncf_status; on failure the handle/output
 *     arguments are untouched and ncf_last_error() describes the problem
 *     (thread-local).
 *   - Strings returned through char** are heap-allocated; release them with
 *     ncf_string_free.
 *   - Polynomials, factorizations and ensemble specs use the library's JSON
 *     formats (see README).
 */

#ifndef NCFACT_H
#define NCFACT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef NCFACT_API
#if defined(_WIN32)
#define NCFACT_API __declspec(dllexport)
#else
#define NCFACT_API __attribute__((visibility("default")))
#endif
#endif

typedef enum ncf_status {
  NCF_OK = 0,
  NCF_ERR_INTERNAL = 1,
  NCF_ERR_INPUT = 2,       /* malformed input, bad arguments, I/O */
  NCF_ERR_VERIFY = 3,      /* an internal consistency check failed */
  NCF_ERR_CONVERGENCE = 4  /* an iterative method hit its cap */
} ncf_status;

typedef struct ncf_poly ncf_poly;
typedef struct ncf_fact ncf_fact;
typedef struct ncf_rep ncf_rep;

NCFACT_API const char* ncf_version(void);
/* Message for the most recent failure on this thread ("" if none). */
NCFACT_API const char* ncf_last_error(void);
NCFACT_API void ncf_string_free(char* s);
NCFACT_API void ncf_buffer_free(double* buf);

/* ---- words ---------------------------------------------------------- */

/* Validates a word against the token grammar and returns its canonical
 * rendering. max_gen <= 0 selects the default maximum (16). */
NCFACT_API ncf_status ncf_word_canonical(const char* text, int max_gen, char** out);

/* ---- polynomials ----------------------------------------------------- */

NCFACT_API ncf_status ncf_poly_from_json(const char* text, ncf_poly** out);
NCFACT_API ncf_status ncf_poly_read(const char* path, ncf_poly** out);
NCFACT_API ncf_status ncf_poly_to_json(const ncf_poly* p, char** out);
NCFACT_API ncf_status ncf_poly_write(const ncf_poly* p, const char* path);
NCFACT_API void ncf_poly_free(ncf_poly* p);

NCFACT_API int ncf_poly_rows(const ncf_poly* p);
NCFACT_API int ncf_poly_cols(const ncf_poly* p);
NCFACT_API int ncf_poly_degree(const ncf_poly* p);
NCFACT_API size_t ncf_poly_term_count(const ncf_poly* p);

/* Zero polynomial of the given shape. */
NCFACT_API ncf_status ncf_poly_zero(int rows, int cols, ncf_poly** out);
/* Adds coeff (x) word to p in place; coeff_reim holds rows*cols interleaved
 * (re, im) pairs in row-major order. */
NCFACT_API ncf_status ncf_poly_add_term(ncf_poly* p, const char* word,
                                        const double* coeff_reim);

NCFACT_API ncf_status ncf_poly_add(const ncf_poly* a, const ncf_poly* b, ncf_poly** out);
NCFACT_API ncf_status ncf_poly_matmul(const ncf_poly* a, const ncf_poly* b, ncf_poly** out);
NCFACT_API ncf_status ncf_poly_adjoint(const ncf_poly* p, ncf_poly** out);
NCFACT_API ncf_status ncf_poly_direct_sum(const ncf_poly* a, const ncf_poly* b,
                                          ncf_poly** out);
/* left is lr x lc, right is rr x rc, both interleaved row-major. */
NCFACT_API ncf_status ncf_poly_scale(const ncf_poly* p, const double* left_reim, int lr,
                                     int lc, const double* right_reim, int rr, int rc,
                                     ncf_poly** out);
NCFACT_API ncf_status ncf_poly_max_abs_diff(const ncf_poly* a, const ncf_poly* b,
                                            double* out);

/* ---- factorizations --------------------------------------------------- */

NCFACT_API ncf_status ncf_factor(const ncf_poly* p, ncf_fact** out);
NCFACT_API ncf_status ncf_fact_from_json(const char* text, ncf_fact** out);
NCFACT_API ncf_status ncf_fact_read(const char* path, ncf_fact** out);
NCFACT_API ncf_status ncf_fact_to_json(const ncf_fact* f, char** out);
NCFACT_API ncf_status ncf_fact_write(const ncf_fact* f, const char* path);
NCFACT_API void ncf_fact_free(ncf_fact* f);

NCFACT_API int ncf_fact_length(const ncf_fact* f);
NCFACT_API double ncf_fact_cost(const ncf_fact* f);
NCFACT_API ncf_status ncf_fact_expand(const ncf_fact* f, ncf_poly** out);
NCFACT_API ncf_status ncf_fact_single_blockify(const ncf_fact* f, ncf_fact** out);
NCFACT_API ncf_status ncf_fact_equalize_sizes(const ncf_fact* f, ncf_fact** out);
NCFACT_API ncf_status ncf_fact_equalize_length(const ncf_fact* f, int target_m,
                                               ncf_fact** out);
/* Degree-<=1 product chain P_1 ... P_m; free with ncf_poly_array_free. */
NCFACT_API ncf_status ncf_fact_absorb(const ncf_fact* f, ncf_poly*** out_factors,
                                      size_t* out_count);
NCFACT_API void ncf_poly_array_free(ncf_poly** arr, size_t count);

/* ---- representations and norms ---------------------------------------- */

/* ensemble_json: { "kind", "dim", "gen_count", "seed", "samples" } with kind
 * one of "haar_unitary", "uniform_permutation", "circulant_shift". */
NCFACT_API ncf_status ncf_rep_sample(const char* ensemble_json, int sample_index,
                                     ncf_rep** out);
NCFACT_API ncf_status ncf_rep_shift(int dim, int gen_count, ncf_rep** out);
NCFACT_API void ncf_rep_free(ncf_rep* r);
NCFACT_API int ncf_rep_dim(const ncf_rep* r);
/* The unitary assigned to generator gen_index, interleaved (re, im)
 * row-major; free with ncf_buffer_free. */
NCFACT_API ncf_status ncf_rep_unitary(const ncf_rep* r, int gen_index, double** out_reim,
                                      int* out_dim);

/* Evaluated matrix, interleaved (re, im) row-major; free with
 * ncf_buffer_free. */
NCFACT_API ncf_status ncf_eval(const ncf_poly* p, const ncf_rep* r, double** out_reim,
                               int* out_rows, int* out_cols);
NCFACT_API ncf_status ncf_eval_norm(const ncf_poly* p, const ncf_rep* r, double* out);
NCFACT_API ncf_status ncf_proxy_norm(const ncf_poly* p, const char* ensemble_json,
                                     int threads, double* out_max, double* out_mean,
                                     double* out_median);
/* Per-sample norms as CSV with columns kind,N,sample_index,norm. */
NCFACT_API ncf_status ncf_norm_csv(const ncf_poly* p, const char* ensemble_json,
                                   int threads, char** out_csv);

/* ---- balancing --------------------------------------------------------- */

/* Block rescaling plus (optional) diagonal similarity descent against the
 * ensemble proxy. report_csv (nullable) receives the per-round cost
 * trajectory as "round,cost" rows. Outputs: the balanced chain plus the
 * initial/final cost, the achieved epsilon (final_cost / proxy_norm - 1) and
 * the chain length. */
NCFACT_API ncf_status ncf_balance(const ncf_fact* f, const char* ensemble_json,
                                  int max_rounds, double tolerance, int similarity,
                                  int threads, ncf_fact** out, double* out_initial_cost,
                                  double* out_final_cost, double* out_epsilon,
                                  char** report_csv);

/* Seeded corpus probe; CSV columns
 * d,n,eps,instance,success,achieved_m,achieved_cost. */
NCFACT_API ncf_status ncf_probe_m(int d, int n, double eps, uint64_t seed, int count,
                                  const char* ensemble_json, int max_rounds,
                                  double tolerance, int threads, char** out_csv);

/* ---- transfer harness --------------------------------------------------- */

/* config_json: { "kind", "sizes": [..], "samples", "seed",
 *   "self_adjoint"?, "epsilon"?, "references"?: [..] }.
 * out_csv columns: N,sample,direct_norm,bound,max_factor_norm,exceed_flag.
 * summary_csv (nullable) columns:
 *   N,max_direct,mean_direct,median_direct,factor_exceed_fraction,
 *   poly_exceed_fraction. */
NCFACT_API ncf_status ncf_transfer(const ncf_poly* p, const char* config_json, int threads,
                                   char** out_csv, char** summary_csv);

/* ---- selftest ----------------------------------------------------------- */

/* Runs the desk-scale invariant suite; returns the number of failed suites
 * and stores the log (one line per suite) in out_log when non-NULL. */
NCFACT_API int ncf_selftest(int threads, char** out_log);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NCFACT_H */
