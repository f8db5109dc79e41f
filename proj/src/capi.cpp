#include "metricdelay.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "embed.hpp"
#include "gen.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "preflow.hpp"
#include "runner.hpp"

using namespace md;

struct md_instance {
  Instance inst;
};
struct md_run {
  PipelineResult result;
};
struct md_solution {
  OfflineSolution sol;
  std::string digest;
};

namespace {

void set_err(char* err, size_t err_len, const std::string& msg) {
  if (!err || err_len == 0) return;
  size_t n = std::min(err_len - 1, msg.size());
  std::memcpy(err, msg.data(), n);
  err[n] = '\0';
}

int classify(const std::string& msg) {
  if (msg.find("state space") != std::string::npos ||
      msg.find("capped at") != std::string::npos)
    return MD_ERR_LIMIT;
  if (msg.find("assumption") != std::string::npos ||
      msg.find("needs a (>=") != std::string::npos ||
      msg.find("must carry") != std::string::npos ||
      msg.find("leaves of the tree") != std::string::npos)
    return MD_ERR_PRECOND;
  return MD_ERR_INVALID;
}

template <typename F>
int guarded(char* err, size_t err_len, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    set_err(err, err_len, e.what());
    return classify(e.what());
  } catch (const std::exception& e) {
    set_err(err, err_len, e.what());
    return MD_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

int md_instance_parse(const char* json, md_instance** out, char* err,
                      size_t err_len) {
  if (!json || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    *out = new md_instance{instance_from_json(json)};
    return MD_OK;
  });
}

int md_instance_load(const char* path, md_instance** out, char* err,
                     size_t err_len) {
  if (!path || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    *out = new md_instance{load_instance(path)};
    return MD_OK;
  });
}

int md_instance_generate(const char* kind, const char* problem, int n,
                         int requests, uint64_t seed, const char* profile,
                         md_instance** out, char* err, size_t err_len) {
  if (!kind || !problem || !profile || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    GenSpec spec;
    spec.kind = kind;
    spec.problem = problem;
    spec.n = n;
    spec.requests = requests;
    spec.seed = seed;
    spec.profile = profile;
    *out = new md_instance{gen_instance(spec)};
    return MD_OK;
  });
}

int md_instance_json(const md_instance* inst, char** out, char* err,
                     size_t err_len) {
  if (!inst || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    *out = dup_string(instance_to_json(inst->inst));
    return MD_OK;
  });
}

int md_instance_embed(const md_instance* inst, uint64_t seed, md_instance** out,
                      char* err, size_t err_len) {
  if (!inst || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    *out = new md_instance{embed_instance(inst->inst, seed).instance};
    return MD_OK;
  });
}

void md_instance_free(md_instance* inst) { delete inst; }

int md_run_execute(const md_instance* inst, const char* algo, uint64_t seed,
                   int with_feas, int grid_refine, md_run** out, char* err,
                   size_t err_len) {
  if (!inst || !algo || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    PipelineOptions opt;
    opt.algo = algo;
    opt.seed = seed;
    opt.compute_feas = with_feas != 0;
    opt.grid_refine = grid_refine;
    *out = new md_run{run_pipeline(inst->inst, opt)};
    return MD_OK;
  });
}

int md_run_trace_json(const md_run* run, char** out, char* err, size_t err_len) {
  if (!run || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    *out = dup_string(trace_to_json(run->result.trace));
    return MD_OK;
  });
}

int md_run_report_json(const md_run* run, char** out, char* err, size_t err_len) {
  if (!run || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    *out = dup_string(report_to_json(run->result.report));
    return MD_OK;
  });
}

int md_run_report_csv(const md_run* run, int with_header, char** out, char* err,
                      size_t err_len) {
  if (!run || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    std::string s;
    if (with_header) s += report_csv_header(run->result.report) + "\n";
    s += report_csv_row(run->result.report) + "\n";
    *out = dup_string(s);
    return MD_OK;
  });
}

int md_run_all_ok(const md_run* run) {
  return run && run->result.report.all_ok() ? 1 : 0;
}

void md_run_free(md_run* run) { delete run; }

int md_oracle(const md_instance* inst, const char* mode, int grid_refine,
              md_solution** out, char* err, size_t err_len) {
  if (!inst || !mode || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    OfflineSolution sol;
    std::string m = mode;
    if (m == "exact")
      sol = opt_fl_deadline_exact(inst->inst);
    else if (m == "grid")
      sol = opt_grid(inst->inst, {grid_refine});
    else
      throw Error("unknown oracle mode: " + m);
    *out = new md_solution{std::move(sol), instance_digest(inst->inst)};
    return MD_OK;
  });
}

int md_solution_parse(const char* json, md_solution** out, char* err,
                      size_t err_len) {
  if (!json || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    std::string digest;
    OfflineSolution sol = solution_from_json(json, &digest);
    *out = new md_solution{std::move(sol), digest};
    return MD_OK;
  });
}

int md_solution_json(const md_solution* sol, char** out, char* err,
                     size_t err_len) {
  if (!sol || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    *out = dup_string(solution_to_json(sol->sol, sol->digest));
    return MD_OK;
  });
}

void md_solution_free(md_solution* sol) { delete sol; }

int md_verify_preflow(const md_instance* inst, const char* trace_json,
                      const md_solution* offline, int dump_graph, char** out,
                      char* err, size_t err_len) {
  if (!inst || !trace_json || !offline || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&]() -> int {
    const Instance& in = inst->inst;
    const Tree& tree = in.the_tree();
    Trace tr = trace_from_json(trace_json);
    std::string digest = instance_digest(in);
    if (!tr.instance_digest.empty() && tr.instance_digest != digest)
      throw Error("trace does not belong to this instance");
    if (!offline->digest.empty() && offline->digest != digest)
      throw Error("offline solution does not belong to this instance");
    CostBreakdown feas = verify_solution(in, tree, offline->sol);
    bool delay_variant = tr.problem == Problem::FlDelay;
    FlPreflow pf = build_fl_preflow(in, tree, tr, offline->sol, delay_variant);
    auto rep = verify_charging_bounds(pf, feas, tr.k, tr.f, tr.depth);

    nlohmann::ordered_json j;
    j["format"] = "mdelay-preflow-report-v1";
    j["variant"] = delay_variant ? "fl-delay (experimental)" : "fl-deadline";
    j["preflow_valid"] = rep.preflow_valid;
    j["excess_sum_zero"] = rep.excess_sum_zero;
    j["root_excesses_ok"] = rep.root_excesses_ok;
    j["charge_bound_ok"] = rep.charge_bound_ok;
    j["kf_bound_ok"] = rep.kf_bound_ok;
    j["kf"] = rat_str(rep.kf);
    j["charge_sum"] = rat_str(rep.charge_sum);
    j["bound_rhs"] = rat_str(rep.bound_rhs);
    j["omega"] = rat_str(pf.omega);
    if (!rep.message.empty()) j["message"] = rep.message;
    if (dump_graph || !rep.ok()) {
      nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
      auto chi = pf.graph.excesses();
      for (size_t i = 0; i < pf.nodes.size(); ++i) {
        const auto& n = pf.nodes[i];
        nlohmann::ordered_json x;
        x["elem"] = n.elem;
        x["tau1"] = n.tau1 ? rat_str(*n.tau1) : "-inf";
        x["tau2"] = n.tau2 ? rat_str(*n.tau2) : "inf";
        x["color"] = pf.color[i] == kColorNone
                         ? "none"
                         : (pf.color[i] == kColorSpecial
                                ? "special"
                                : std::to_string(pf.color[i]));
        x["c_b"] = rat_str(pf.cost_buy[i]);
        x["c_c"] = rat_str(pf.cost_connect[i]);
        x["c_d"] = rat_str(pf.cost_delay[i]);
        x["excess"] = rat_str(chi[i + 1]);
        nodes.push_back(x);
      }
      j["nodes"] = nodes;
      nlohmann::ordered_json edges = nlohmann::ordered_json::array();
      for (const auto& e : pf.graph.edges)
        edges.push_back(nlohmann::ordered_json{
            {"from", e.from}, {"to", e.to}, {"alpha", rat_str(e.alpha)}});
      j["edges"] = edges;
    }
    *out = dup_string(j.dump(1));
    return rep.ok() ? MD_OK : MD_ERR_BOUND;
  });
}

int md_bench_csv(const char* kind, const char* problem, const char* algo, int n,
                 int requests, const char* profile, uint64_t master_seed,
                 int trials, int with_feas, int grid_refine, char** out,
                 char* err, size_t err_len) {
  if (!kind || !problem || !algo || !profile || !out) return MD_ERR_INVALID;
  return guarded(err, err_len, [&] {
    BenchOptions opt;
    opt.gen.kind = kind;
    opt.gen.problem = problem;
    opt.gen.n = n;
    opt.gen.requests = requests;
    opt.gen.seed = master_seed;
    opt.gen.profile = profile;
    opt.algo = algo;
    opt.trials = trials;
    opt.compute_feas = with_feas != 0;
    opt.grid_refine = grid_refine;
    *out = dup_string(bench_csv(opt));
    return MD_OK;
  });
}

void md_string_free(char* s) { delete[] s; }

}  // extern "C"
