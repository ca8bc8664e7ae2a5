/*
 * persuade — C API for the judge-persuadability measurement library.
 *
 * Opaque handles plus error codes. Every function returns PERSUADE_OK on
 * success; on failure the return value names the failure class and
 * persuade_last_error() carries a thread-local message for the failing call.
 * Strings returned through char** out-parameters are heap-allocated; release
 * them with persuade_string_free().
 */

#ifndef PERSUADE_H
#define PERSUADE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PERSUADE_API __declspec(dllexport)
#else
#define PERSUADE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum persuade_status {
  PERSUADE_OK = 0,
  PERSUADE_ERR_IO = 1,
  PERSUADE_ERR_SCHEMA = 2,
  PERSUADE_ERR_VALIDATION = 3,
  PERSUADE_ERR_DOMAIN = 4,
  PERSUADE_ERR_TRANSPORT = 5,
  PERSUADE_ERR_AUTH = 6,
  PERSUADE_ERR_REFUSAL = 7,
  PERSUADE_ERR_AMBIGUOUS_VERDICT = 8,
  PERSUADE_ERR_INSUFFICIENT_POOL = 9,
  PERSUADE_ERR_DANGLING_REFERENCE = 10,
  PERSUADE_ERR_UNKNOWN_ADVOCATE = 11,
  PERSUADE_ERR_EMPTY_INPUT = 12,
  PERSUADE_ERR_DEGENERATE_TABLE = 13,
  PERSUADE_ERR_MISSING_CONDITION = 14,
  PERSUADE_ERR_MISSING_JURISDICTION = 15,
  PERSUADE_ERR_WRONG_LEDGER_KIND = 16,
  PERSUADE_ERR_STATE = 17,
  PERSUADE_ERR_INTERNAL = 18
} persuade_status;

PERSUADE_API const char* persuade_version(void);
PERSUADE_API const char* persuade_status_name(persuade_status status);

/* Message from the most recent failing call on this thread ("" if none). */
PERSUADE_API const char* persuade_last_error(void);

PERSUADE_API void persuade_string_free(char* s);

/* ------------------------------------------------------------------------ */
/* Corpus                                                                    */
/* ------------------------------------------------------------------------ */

typedef struct persuade_corpus persuade_corpus;

PERSUADE_API persuade_status persuade_corpus_load(const char* path, int strict,
                                                  persuade_corpus** out);
PERSUADE_API void persuade_corpus_free(persuade_corpus* corpus);
PERSUADE_API size_t persuade_corpus_scenario_count(const persuade_corpus* corpus);
/* Warnings recorded by a non-strict load, as a JSON array of strings. */
PERSUADE_API persuade_status persuade_corpus_warnings(
    const persuade_corpus* corpus, char** warnings_json);

/* ------------------------------------------------------------------------ */
/* Argument bank                                                             */
/* ------------------------------------------------------------------------ */

typedef struct persuade_bank persuade_bank;

PERSUADE_API persuade_status persuade_bank_load(const char* path,
                                                persuade_bank** out);
PERSUADE_API void persuade_bank_free(persuade_bank* bank);
PERSUADE_API size_t persuade_bank_record_count(const persuade_bank* bank);
/* Violations as a JSON array of strings; empty array means valid. */
PERSUADE_API persuade_status persuade_bank_validate(const persuade_bank* bank,
                                                    const persuade_corpus* corpus,
                                                    char** violations_json);

/*
 * config_json: {"corpus_path", "providers_path", "bank_path",
 *               "advocates": [ids], "conditions": [names]?, "k"?, "seed"?,
 *               "strict_corpus"?}
 * summary_json out: {"issued", "reused", "expected", "failures": [...]}
 */
PERSUADE_API persuade_status persuade_generate_bank(const char* config_json,
                                                    char** summary_json);

/* ------------------------------------------------------------------------ */
/* Campaigns                                                                 */
/* ------------------------------------------------------------------------ */

/*
 * config_json: the campaign config schema
 *   {"seed", "trials_per_condition", "trials_per_judge", "judges",
 *    "advocates", "conditions"?, "corpus_path", "bank_path",
 *    "providers_path", "parallelism", "failure_threshold", "replacement_cap"}
 * options_json (may be NULL): {"max_new_trials"?, "store_objects"?,
 *    "objects_dir"?, "logical_clock"?}
 * summary_json out: per-judge completion/failure/abort counts.
 */
PERSUADE_API persuade_status persuade_run_campaign(const char* config_json,
                                                   const char* ledger_path,
                                                   const char* options_json,
                                                   char** summary_json);
PERSUADE_API persuade_status persuade_run_head_to_head(const char* config_json,
                                                       const char* ledger_path,
                                                       const char* options_json,
                                                       char** summary_json);

/*
 * spec_json: {"seed", "strengths", "corpus_path"?, "trials_per_condition"?,
 *             "judges"?, "k"?, "parallelism"?, "out_dir", "max_new_trials"?,
 *             "store_objects"?, "permutation_replications"?}
 * result_json out: paths of every artifact written plus the run summary.
 */
PERSUADE_API persuade_status persuade_simulate(const char* spec_json,
                                               char** result_json);

/* Offline analysis: writes report.md / report.csv / report.json to out_dir. */
PERSUADE_API persuade_status persuade_analyze(const char* ledger_path,
                                              const char* out_dir,
                                              int permutation_replications,
                                              char** result_json);

/* ------------------------------------------------------------------------ */
/* Metrics and statistics scalars                                            */
/* ------------------------------------------------------------------------ */

PERSUADE_API persuade_status persuade_bt_win_probability(double s_i, double s_j,
                                                         double* out);
PERSUADE_API persuade_status persuade_expected_p2(double win_probability,
                                                  double* out);
PERSUADE_API persuade_status persuade_pairwise_persuadability(int64_t m1,
                                                              int64_t m2,
                                                              double* out);
PERSUADE_API persuade_status persuade_win_rate_from_p(double p, double* out);
/* two_sided nonzero selects the two-sided test. */
PERSUADE_API persuade_status persuade_binomial_test(int64_t k, int64_t n,
                                                    double p0, int two_sided,
                                                    double* p_value);
PERSUADE_API persuade_status persuade_chi_squared_sf(double x, int df,
                                                     double* out);
PERSUADE_API persuade_status persuade_wilson_interval(int64_t k, int64_t n,
                                                      double confidence,
                                                      double* lo, double* hi);

#ifdef __cplusplus
}
#endif

#endif /* PERSUADE_H */
