// Exercises the shared-library surface end to end: generate -> run ->
// report/trace -> oracle -> charging verification, plus the error paths.

#include <cstdio>
#include <cstring>
#include <string>

#include "metricdelay.h"

static int failures = 0;

#define EXPECT(cond, msg)                              \
  do {                                                 \
    if (!(cond)) {                                     \
      std::fprintf(stderr, "FAIL: %s\n", msg);         \
      ++failures;                                      \
    }                                                  \
  } while (0)

int main() {
  char err[512] = {0};

  md_instance* inst = nullptr;
  EXPECT(md_instance_generate("random-hst", "fl-deadline", 5, 5, 42,
                              "deadline-uniform", &inst, err, sizeof err) == MD_OK,
         "generate");
  EXPECT(inst != nullptr, "generate handle");

  char* json = nullptr;
  EXPECT(md_instance_json(inst, &json, err, sizeof err) == MD_OK, "instance json");
  EXPECT(json && std::strstr(json, "mdelay-instance-v1"), "instance format tag");
  md_instance* again = nullptr;
  EXPECT(md_instance_parse(json, &again, err, sizeof err) == MD_OK, "parse");
  char* json2 = nullptr;
  EXPECT(md_instance_json(again, &json2, err, sizeof err) == MD_OK, "re-json");
  EXPECT(std::strcmp(json, json2) == 0, "round trip identical");
  md_string_free(json);
  md_string_free(json2);
  md_instance_free(again);

  md_run* run = nullptr;
  EXPECT(md_run_execute(inst, "fl-deadline", 0, 1, 0, &run, err, sizeof err) ==
             MD_OK,
         "run");
  EXPECT(md_run_all_ok(run) == 1, "run checks pass");
  char* report = nullptr;
  EXPECT(md_run_report_json(run, &report, err, sizeof err) == MD_OK, "report");
  EXPECT(std::strstr(report, "alg_le_3D1kf") != nullptr, "report check name");
  md_string_free(report);
  char* csv = nullptr;
  EXPECT(md_run_report_csv(run, 1, &csv, err, sizeof err) == MD_OK, "csv");
  EXPECT(std::strstr(csv, "instance,seed,algo") != nullptr, "csv header");
  md_string_free(csv);
  char* trace = nullptr;
  EXPECT(md_run_trace_json(run, &trace, err, sizeof err) == MD_OK, "trace");

  md_solution* sol = nullptr;
  EXPECT(md_oracle(inst, "exact", 0, &sol, err, sizeof err) == MD_OK, "oracle");
  char* verdict = nullptr;
  EXPECT(md_verify_preflow(inst, trace, sol, 0, &verdict, err, sizeof err) ==
             MD_OK,
         "verify-preflow passes");
  EXPECT(verdict && std::strstr(verdict, "\"preflow_valid\": true"),
         "verify report");
  md_string_free(verdict);
  md_string_free(trace);
  md_solution_free(sol);
  md_run_free(run);

  // Error paths carry messages and classified codes.
  md_run* bad_run = nullptr;
  int rc = md_run_execute(inst, "no-such-algo", 0, 0, 0, &bad_run, err, sizeof err);
  EXPECT(rc == MD_ERR_INVALID, "unknown algo code");
  EXPECT(err[0] != '\0', "unknown algo message");

  err[0] = '\0';
  rc = md_run_execute(inst, "mad", 0, 0, 0, &bad_run, err, sizeof err);
  EXPECT(rc != MD_OK, "running mad on an fl instance fails");

  md_instance* bad_gen = nullptr;
  rc = md_instance_generate("random-hst", "fl-delay", 5, 5, 1,
                            "deadline-uniform", &bad_gen, err, sizeof err);
  EXPECT(rc != MD_OK, "mismatched profile rejected");

  md_instance_free(inst);

  char *b1 = nullptr, *b2 = nullptr;
  EXPECT(md_bench_csv("random-hst", "mad", "mad", 6, 8, "linear-slopes", 7, 3,
                      0, 0, &b1, err, sizeof err) == MD_OK,
         "bench 1");
  EXPECT(md_bench_csv("random-hst", "mad", "mad", 6, 8, "linear-slopes", 7, 3,
                      0, 0, &b2, err, sizeof err) == MD_OK,
         "bench 2");
  EXPECT(b1 && b2 && std::strcmp(b1, b2) == 0, "bench deterministic");
  md_string_free(b1);
  md_string_free(b2);

  if (failures == 0) std::printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
