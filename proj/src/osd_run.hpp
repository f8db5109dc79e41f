#pragma once

#include "instance.hpp"
#include "solution.hpp"
#include "trace.hpp"

namespace md {

// Edges that are major for the given server position: every edge on the path
// from the server to the edge weighs at most as much as the edge itself.
// Deterministic order (weight, then id).
std::vector<int> major_edges(const Tree& t, int server);

struct OsdCritical {
  Rat t;
  int edge = -1;
  bool relative = false;  // Y = R_e (server internal to T_e) vs Y = T_e
};

// Earliest criticality over all major edges, testing T_e when the server is
// not internal to T_e and R_e when it is. Ties break by smaller edge weight,
// then edge id. nullopt when no pending set can ever become critical.
std::optional<OsdCritical> detect_osd_critical(const Tree& t, int server,
                                               const std::vector<const Request*>& pending,
                                               const Rat& t0);

struct OsdRunResult {
  Trace trace;
  CostBreakdown cost;
  int k = 0;  // number of services
};

// Online service with delay on a power-of-2 (>=2)-HST.
OsdRunResult run_osd(const Instance& inst);

// Scores an execution against a feasible offline solution: computes the
// same-side indicators and checks the charge bound
//   sum_i I_i * w(e_i) <= 3*FEAS^B + 3*D*FEAS^D.
struct OsdScore {
  std::vector<int> indicators;
  Rat lhs, rhs;
  Rat feas_buy, feas_delay;
  bool ok = false;
};
OsdScore score_against(const Instance& inst, const Tree& tree, const Trace& tr,
                       const OfflineSolution& offline);

// Leaf-only movement ledger: collapses runs of segments through virtual
// internal positions into leaf-to-leaf (or endpoint) segments whose cost is
// the distance actually walked.
struct LedgerSegment {
  int from = -1, to = -1;
  Rat cost;
  Rat t;
};
std::vector<LedgerSegment> leaf_movement_ledger(const Tree& t, const Trace& tr);

}  // namespace md
