/* metricdelay: online algorithms for metric problems with deadlines or delay
 * (facility location, multilevel aggregation, online service) over HSTs plus
 * offline oracles, randomized HST embedding and a charging-graph verifier.
 *
 * Plain C surface over opaque handles. All functions return MD_OK (0) on
 * success or a negative md_status; on failure an error message is written to
 * the caller's buffer when one is provided. Strings returned through
 * md_*_json are heap-allocated; release them with md_string_free.
 */
#ifndef METRICDELAY_H
#define METRICDELAY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum md_status {
  MD_OK = 0,
  MD_ERR_INVALID = -1,   /* bad arguments or malformed input file */
  MD_ERR_PRECOND = -2,   /* instance violates a load-time assumption */
  MD_ERR_LIMIT = -3,     /* oracle state space or size cap exceeded */
  MD_ERR_BOUND = -4,     /* an asserted bound check failed */
  MD_ERR_INTERNAL = -5
} md_status;

typedef struct md_instance md_instance;
typedef struct md_run md_run;
typedef struct md_solution md_solution;

/* --- instances ----------------------------------------------------------- */

int md_instance_parse(const char* json, md_instance** out,
                      char* err, size_t err_len);
int md_instance_load(const char* path, md_instance** out,
                     char* err, size_t err_len);
/* kind: random-hst | random-tree | random-euclidean;
 * problem: fl-deadline | fl-delay | mad | osd;
 * profile: deadline-uniform | linear-slopes | bursty-coalitions. */
int md_instance_generate(const char* kind, const char* problem, int n,
                         int requests, uint64_t seed, const char* profile,
                         md_instance** out, char* err, size_t err_len);
int md_instance_json(const md_instance* inst, char** out,
                     char* err, size_t err_len);
/* Randomized HST embedding of a metric-form instance (no-op error when the
 * instance is already a tree). */
int md_instance_embed(const md_instance* inst, uint64_t seed,
                      md_instance** out, char* err, size_t err_len);
void md_instance_free(md_instance* inst);

/* --- runs ---------------------------------------------------------------- */

/* algo: fl-deadline | fl-delay | mad | mad-general | osd. seed drives the
 * embedding when the instance is metric-form. with_feas additionally runs the
 * offline oracle and evaluates the offline-relative bound checks. */
int md_run_execute(const md_instance* inst, const char* algo, uint64_t seed,
                   int with_feas, int grid_refine, md_run** out,
                   char* err, size_t err_len);
int md_run_trace_json(const md_run* run, char** out, char* err, size_t err_len);
int md_run_report_json(const md_run* run, char** out, char* err, size_t err_len);
int md_run_report_csv(const md_run* run, int with_header, char** out,
                      char* err, size_t err_len);
/* 1 when every bound check of the run passed, else 0. */
int md_run_all_ok(const md_run* run);
void md_run_free(md_run* run);

/* --- offline oracles ------------------------------------------------------ */

/* mode: exact (fl-deadline, <= 8 requests) | grid. */
int md_oracle(const md_instance* inst, const char* mode, int grid_refine,
              md_solution** out, char* err, size_t err_len);
int md_solution_parse(const char* json, md_solution** out,
                      char* err, size_t err_len);
int md_solution_json(const md_solution* sol, char** out,
                     char* err, size_t err_len);
void md_solution_free(md_solution* sol);

/* --- charging-graph verification ----------------------------------------- */

/* Builds the facility-location-with-deadlines charging preflow for the given
 * trace against the offline solution and checks: excess conservation,
 * validity, root excesses >= f, and the kf / charge bounds. Writes a JSON
 * report (including the graph when dump_graph != 0). Returns MD_ERR_BOUND
 * when a check fails. */
int md_verify_preflow(const md_instance* inst, const char* trace_json,
                      const md_solution* offline, int dump_graph, char** out,
                      char* err, size_t err_len);

/* --- benchmarking --------------------------------------------------------- */

int md_bench_csv(const char* kind, const char* problem, const char* algo,
                 int n, int requests, const char* profile, uint64_t master_seed,
                 int trials, int with_feas, int grid_refine, char** out,
                 char* err, size_t err_len);

void md_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* METRICDELAY_H */
