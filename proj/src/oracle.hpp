#pragma once

#include "solution.hpp"
#include "surplus.hpp"

namespace md {

// Exact offline optimum for facility location with deadlines (at most 8
// requests): exhaustive over set partitions into services; each group is
// served at its minimum member deadline at the cost-minimizing node.
// Shifting a group's service later never helps and stays feasible exactly
// when every member is released by the group time, so the minimum-deadline
// canonical time is optimal.
OfflineSolution opt_fl_deadline_exact(const Instance& inst);

// Raw variant used only to cross-check the canonicalization: enumerates the
// group service time over all deadlines (at most 4 requests).
OfflineSolution opt_fl_deadline_raw(const Instance& inst);

struct GridOptions {
  int refine = 0;          // extra evenly spaced times per grid gap
  long state_limit = 10'000'000;
};

// Minimum-cost feasible solution restricted to acting at grid times (all
// releases, deadlines and delay breakpoints plus refinements). Feasible by
// construction and >= the true optimum, so every "LHS <= c*OPT" check may use
// it as the FEAS side.
OfflineSolution opt_grid(const Instance& inst, const GridOptions& opt = {});

// Subset/ancestor-set enumerations backing the surplus DPs (test oracles).
Rat brute_saturation(const Tree& t, int edge, const RequestList& pending,
                     const Rat& at);
Rat brute_psi(const Tree& t, int u, const RequestList& q, const Rat& f);
// max over nonempty subsets Q of pending in T_u of d_Q(at) - psi_u(Q),
// with psi evaluated by ancestor-set enumeration; -f when nothing pending.
Rat brute_fl_critical(const Tree& t, int u, const Rat& f,
                      const RequestList& pending, const Rat& at);

}  // namespace md
