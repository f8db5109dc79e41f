#pragma once

#include "solution.hpp"
#include "trace.hpp"

namespace md {

// Weighted directed multigraph with a distinguished source; validity means
// nonnegative excess everywhere off the source.
struct PreflowGraph {
  struct Edge {
    int from, to;
    Rat alpha;
  };
  int source = 0;
  int node_count = 0;
  std::vector<Edge> edges;

  void add_edge(int from, int to, const Rat& alpha) {
    if (alpha < 0) throw Error("preflow edges need nonnegative weights");
    edges.push_back({from, to, alpha});
  }
  std::vector<Rat> excesses() const;
  Rat omega() const;  // -excess(source)
};

struct PreflowCheck {
  bool ok = true;
  Rat excess_sum;           // over every node including the source; must be 0
  int first_negative = -1;  // first non-source node with negative excess
  std::string message;
};
PreflowCheck check_preflow(const PreflowGraph& g);

// One charging node: a tree element together with an interval between two
// consecutive explorations of that element (with -infinity / +infinity
// sentinels at the ends).
struct ChargingNode {
  int elem = -1;
  MaybeTime tau1, tau2;  // nullopt = the matching infinity
  bool is_root_elem = false;
  int explore_starting = -1;  // exploration whose entry time is tau1
};

enum : int { kColorNone = -1, kColorSpecial = -2 };

struct FlPreflow {
  PreflowGraph graph;                // node 0 = source, then charging nodes
  std::vector<ChargingNode> nodes;   // index i <-> graph node i+1
  std::vector<int> color;            // kColorNone / kColorSpecial / root node index
  std::vector<Rat> cost_buy, cost_connect, cost_delay;  // c_b, c_c, c_d per node
  std::vector<int> root_nodes;       // the k finite-tau2 root charging nodes, in order
  Rat omega;
};

// Builds the charging preflow of a facility-location-with-deadlines run
// against an offline solution, exactly per the builder procedure: Special
// marking, source edges weighted by the incurred costs, root color creation,
// depth-ordered propagation via SetColor. Investment edges run from the
// receiving counter phase to the investing exploration, so excess flows
// toward the root charging nodes.
//
// With `delay_variant` the facility-location-with-delay parameterization is
// used instead: half-open intervals, incurred delay costs, and the
// two-condition lambda. That variant is experimental and not part of the
// acceptance surface.
FlPreflow build_fl_preflow(const Instance& inst, const Tree& tree, const Trace& tr,
                           const OfflineSolution& offline,
                           bool delay_variant = false);

struct ChargingBoundsReport {
  bool preflow_valid = false;
  bool excess_sum_zero = false;
  bool root_excesses_ok = false;  // chi >= f at each of the k root nodes
  bool charge_bound_ok = false;   // sum c(mu) <= 2(D+1) OPT^B + 4 OPT^C
  bool kf_bound_ok = false;       // k f   <= 2(D+1) OPT^B + 4 OPT^C
  Rat kf, charge_sum, bound_rhs;
  std::string message;
  bool ok() const {
    return preflow_valid && excess_sum_zero && root_excesses_ok &&
           charge_bound_ok && kf_bound_ok;
  }
};

ChargingBoundsReport verify_charging_bounds(const FlPreflow& pf,
                                            const CostBreakdown& offline_cost,
                                            int k, const Rat& f, int depth);

}  // namespace md
