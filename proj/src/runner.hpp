#pragma once

#include <optional>

#include "gen.hpp"
#include "instance.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "solution.hpp"
#include "trace.hpp"

namespace md {

struct PipelineOptions {
  std::string algo;       // fl-deadline | fl-delay | mad | mad-general | osd
  uint64_t seed = 0;      // embedding seed (metric instances)
  bool compute_feas = false;  // add the offline-feasible bound checks
  int grid_refine = 0;
};

struct PipelineResult {
  Instance run_instance;  // tree-form instance the algorithm actually saw
  Trace trace;
  RunReport report;
  std::optional<OfflineSolution> feas;
};

// Embed (when the metric is not a tree), run, audit the trace with the
// independent cost accountant, and evaluate the per-run bound checks.
PipelineResult run_pipeline(const Instance& inst, const PipelineOptions& opt);

struct BenchOptions {
  GenSpec gen;            // trial seeds derive from gen.seed ^ trial index
  std::string algo;
  int trials = 10;
  bool compute_feas = false;
  int grid_refine = 0;
};

// One CSV row per trial, deterministic in the master seed.
std::string bench_csv(const BenchOptions& opt);

}  // namespace md
