// mdelay: CLI harness over the metricdelay C API.
//
//   mdelay gen            --kind random-hst --problem fl-deadline ...
//   mdelay embed          --instance in.json --seed 7 --out tree.json
//   mdelay run            --instance in.json --algo fl-deadline [--feas] ...
//   mdelay oracle         --instance in.json --mode exact --out sol.json
//   mdelay verify-preflow --instance in.json --trace t.json --solution s.json
//   mdelay bench          --kind random-hst --problem mad --algo mad ...
//
// Exit status is nonzero iff a command fails or an asserted bound check fails.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "metricdelay.h"

namespace {

char g_err[1024];

[[noreturn]] void die(int code) {
  std::fprintf(stderr, "error: %s\n", g_err[0] ? g_err : "unknown failure");
  std::exit(code == MD_ERR_BOUND ? 2 : 1);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: cannot open %s\n", path.c_str());
    std::exit(1);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out_path, const char* text) {
  if (out_path.empty() || out_path == "-") {
    std::fwrite(text, 1, std::strlen(text), stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
    std::exit(1);
  }
  out << text;
}

md_instance* load_instance_arg(const std::string& path) {
  md_instance* inst = nullptr;
  int rc = md_instance_load(path.c_str(), &inst, g_err, sizeof g_err);
  if (rc != MD_OK) die(rc);
  return inst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online metric problems with deadlines/delay: harness"};
  app.require_subcommand(1);

  std::string kind = "random-hst", problem = "fl-deadline",
              profile = "deadline-uniform", algo, instance_path, out_path,
              trace_path, solution_path, mode = "grid", format = "json";
  int n = 8, requests = 10, trials = 10, grid_refine = 0;
  uint64_t seed = 0;
  bool with_feas = false, dump_graph = false, experimental_delay_preflow = false;

  auto* gen = app.add_subcommand("gen", "generate a deterministic instance");
  gen->add_option("--kind", kind, "random-hst | random-tree | random-euclidean");
  gen->add_option("--problem", problem, "fl-deadline | fl-delay | mad | osd");
  gen->add_option("--n", n, "leaves / points");
  gen->add_option("--requests", requests);
  gen->add_option("--seed", seed);
  gen->add_option("--profile", profile,
                  "deadline-uniform | linear-slopes | bursty-coalitions");
  gen->add_option("--out", out_path);

  auto* embed = app.add_subcommand("embed", "embed a metric instance into an HST");
  embed->add_option("--instance", instance_path)->required();
  embed->add_option("--seed", seed);
  embed->add_option("--out", out_path);

  auto* run = app.add_subcommand("run", "run an online algorithm");
  run->add_option("--instance", instance_path)->required();
  run->add_option("--algo", algo,
                  "fl-deadline | fl-delay | mad | mad-general | osd")
      ->required();
  run->add_option("--seed", seed, "embedding seed for metric instances");
  run->add_flag("--feas", with_feas, "also run the offline oracle and check bounds");
  run->add_option("--grid-refine", grid_refine);
  run->add_option("--out", out_path, "report output (json)");
  run->add_option("--trace-out", trace_path, "execution trace output");
  run->add_option("--format", format, "json | csv");

  auto* oracle = app.add_subcommand("oracle", "offline brute-force solution");
  oracle->add_option("--instance", instance_path)->required();
  oracle->add_option("--mode", mode, "exact | grid");
  oracle->add_option("--grid-refine", grid_refine);
  oracle->add_option("--out", out_path);

  auto* verify = app.add_subcommand("verify-preflow",
                                    "check the charging analysis on a trace");
  verify->add_option("--instance", instance_path)->required();
  verify->add_option("--trace", trace_path)->required();
  verify->add_option("--solution", solution_path)->required();
  verify->add_flag("--dump-graph", dump_graph);
  verify->add_flag("--experimental-fl-delay-preflow", experimental_delay_preflow,
                   "allow the fl-delay builder variant");
  verify->add_option("--out", out_path);

  auto* bench = app.add_subcommand("bench", "seeded trials, one CSV row each");
  bench->add_option("--kind", kind);
  bench->add_option("--problem", problem);
  bench->add_option("--algo", algo)->required();
  bench->add_option("--n", n);
  bench->add_option("--requests", requests);
  bench->add_option("--profile", profile);
  bench->add_option("--seed", seed, "master seed; trial seeds are seed^trial");
  bench->add_option("--trials", trials);
  bench->add_flag("--feas", with_feas);
  bench->add_option("--grid-refine", grid_refine);
  bench->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);
  g_err[0] = '\0';

  if (gen->parsed()) {
    md_instance* inst = nullptr;
    int rc = md_instance_generate(kind.c_str(), problem.c_str(), n, requests,
                                  seed, profile.c_str(), &inst, g_err,
                                  sizeof g_err);
    if (rc != MD_OK) die(rc);
    char* json = nullptr;
    rc = md_instance_json(inst, &json, g_err, sizeof g_err);
    if (rc != MD_OK) die(rc);
    emit(out_path, json);
    md_string_free(json);
    md_instance_free(inst);
    return 0;
  }

  if (embed->parsed()) {
    md_instance* inst = load_instance_arg(instance_path);
    md_instance* tree = nullptr;
    int rc = md_instance_embed(inst, seed, &tree, g_err, sizeof g_err);
    if (rc != MD_OK) die(rc);
    char* json = nullptr;
    rc = md_instance_json(tree, &json, g_err, sizeof g_err);
    if (rc != MD_OK) die(rc);
    emit(out_path, json);
    md_string_free(json);
    md_instance_free(tree);
    md_instance_free(inst);
    return 0;
  }

  if (run->parsed()) {
    md_instance* inst = load_instance_arg(instance_path);
    md_run* r = nullptr;
    int rc = md_run_execute(inst, algo.c_str(), seed, with_feas ? 1 : 0,
                            grid_refine, &r, g_err, sizeof g_err);
    if (rc != MD_OK) die(rc);
    char* text = nullptr;
    if (format == "csv")
      rc = md_run_report_csv(r, 1, &text, g_err, sizeof g_err);
    else
      rc = md_run_report_json(r, &text, g_err, sizeof g_err);
    if (rc != MD_OK) die(rc);
    emit(out_path, text);
    md_string_free(text);
    if (!trace_path.empty()) {
      char* tr = nullptr;
      rc = md_run_trace_json(r, &tr, g_err, sizeof g_err);
      if (rc != MD_OK) die(rc);
      emit(trace_path, tr);
      md_string_free(tr);
    }
    int ok = md_run_all_ok(r);
    md_run_free(r);
    md_instance_free(inst);
    if (!ok) {
      std::fprintf(stderr, "bound check failed (see report)\n");
      return 2;
    }
    return 0;
  }

  if (oracle->parsed()) {
    md_instance* inst = load_instance_arg(instance_path);
    md_solution* sol = nullptr;
    int rc = md_oracle(inst, mode.c_str(), grid_refine, &sol, g_err, sizeof g_err);
    if (rc != MD_OK) die(rc);
    char* json = nullptr;
    rc = md_solution_json(sol, &json, g_err, sizeof g_err);
    if (rc != MD_OK) die(rc);
    emit(out_path, json);
    md_string_free(json);
    md_solution_free(sol);
    md_instance_free(inst);
    return 0;
  }

  if (verify->parsed()) {
    md_instance* inst = load_instance_arg(instance_path);
    std::string trace_json = slurp(trace_path);
    md_solution* sol = nullptr;
    int rc = md_solution_parse(slurp(solution_path).c_str(), &sol, g_err,
                               sizeof g_err);
    if (rc != MD_OK) die(rc);
    if (!experimental_delay_preflow &&
        trace_json.find("\"fl-delay\"") != std::string::npos) {
      std::fprintf(stderr,
                   "error: the fl-delay preflow builder is experimental; pass "
                   "--experimental-fl-delay-preflow to enable it\n");
      return 1;
    }
    char* report = nullptr;
    rc = md_verify_preflow(inst, trace_json.c_str(), sol,
                           dump_graph ? 1 : 0, &report, g_err, sizeof g_err);
    if (report) {
      emit(out_path, report);
      md_string_free(report);
    }
    md_solution_free(sol);
    md_instance_free(inst);
    if (rc == MD_ERR_BOUND) {
      std::fprintf(stderr, "charging check failed (see report dump)\n");
      return 2;
    }
    if (rc != MD_OK) die(rc);
    return 0;
  }

  if (bench->parsed()) {
    char* csv = nullptr;
    int rc = md_bench_csv(kind.c_str(), problem.c_str(), algo.c_str(), n,
                          requests, profile.c_str(), seed, trials,
                          with_feas ? 1 : 0, grid_refine, &csv, g_err,
                          sizeof g_err);
    if (rc != MD_OK) die(rc);
    emit(out_path, csv);
    // Exit nonzero iff some trial's all_ok column (last per row) is 0.
    bool bad = false;
    {
      std::istringstream rows{std::string(csv)};
      std::string row;
      std::getline(rows, row);  // header
      while (std::getline(rows, row))
        if (row.size() >= 2 && row.substr(row.size() - 2) == ",0") bad = true;
    }
    md_string_free(csv);
    if (bad) {
      std::fprintf(stderr, "bound check failed in at least one trial\n");
      return 2;
    }
    return 0;
  }

  return 0;
}
