#pragma once

#include "instance.hpp"
#include "trace.hpp"

namespace md {

struct RunResult {
  Trace trace;
  CostBreakdown cost;
  int k = 0;
};

// Facility location with deadlines on a (>=2)-HST. Services are triggered by
// expiring deadlines; each service is instantaneous at its trigger time.
RunResult run_fl_deadline(const Instance& inst);

// Facility location with delay on a (>=2)-HST. Services are triggered by
// critical request sets; explorations forward the clock between events, and
// requests released inside a service's forwarded window become pending only
// when the outermost call returns.
RunResult run_fl_delay(const Instance& inst);

// Report-time transform: reopen every internal facility at the closest leaf
// among its connected requests (connection costs at most double).
struct LeafProjection {
  std::vector<std::pair<Rat, int>> openings;  // (t, leaf)
  std::map<int, int> connection_target;       // request -> leaf
  Rat connect_cost;
};
LeafProjection project_to_leaves(const Instance& inst, const Tree& tree,
                                 const Trace& tr);

}  // namespace md
