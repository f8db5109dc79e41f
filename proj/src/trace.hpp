#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "instance.hpp"
#include "rational.hpp"

namespace md {

struct CostBreakdown {
  Rat buy, connect, delay;
  Rat total() const { return buy + connect + delay; }
};

// Time-ordered record of a single run. Every event carries a global sequence
// number; within one timestamp the sequence fixes the order deterministically.
struct Trace {
  struct Explore {
    int id = -1;
    int elem = -1;  // node (FL) or edge (MAD/OSD)
    Rat t_enter, t_return;
    std::optional<Rat> lambda;  // recorded at return; nullopt = +infinity
    int parent = -1;            // exploring call that triggered this one
    int service = -1;           // index of the enclosing service
    int enter_seq = -1, return_seq = -1;
  };
  struct Raise {
    int explore = -1;  // investing exploration
    int target = -1;   // node/edge whose counter was raised
    Rat amount;
    long target_phase = 0;  // value of the target's reset count at the raise
    Rat t;
    int seq = -1;
  };
  struct Open {  // FL facility opening
    int node = -1;
    Rat t;
    int explore = -1;
    int seq = -1;
  };
  struct Connect {  // FL connection
    int request = -1, node = -1;
    Rat cost;
    Rat t;
    int explore = -1;
    int seq = -1;
  };
  struct Serve {
    int request = -1;
    Rat t;
    Rat delay_paid;
    int service = -1;
    int seq = -1;
  };
  struct AddEdge {  // MAD/OSD transmission growth
    int edge = -1;
    Rat t;
    int service = -1;
    int seq = -1;
  };
  struct Transmit {  // MAD
    std::vector<int> edges;
    Rat weight;
    Rat t;
    int service = -1;
    int seq = -1;
    int served_count = 0;
    // General-tree runs: concretization and its weight ("--" when identical).
    std::vector<int> concrete_edges;
    Rat concrete_weight;
  };
  struct Move {  // OSD server movement segment
    int from = -1, to = -1;
    Rat cost;
    Rat t;
    int kind = 0;  // 0 approach, 1 traversal step, 2 crossing
    int service = -1;
    int seq = -1;
  };
  struct OsdService {
    int index = -1;
    Rat t_trigger, t_end;
    int major_edge = -1;
    bool relative_side = false;  // true: Y = R_e, false: Y = T_e
    Rat approach_cost, traverse_cost, cross_cost;
    Rat explored_weight;  // w(T)
    bool server_in_te_before = false, server_in_te_after = false;
    std::vector<int> edges;
    int phase = -1;
  };
  struct PendingEntry {  // request became pending (after quarantine)
    int request = -1;
    Rat t;
    int seq = -1;
  };

  Problem problem = Problem::FlDeadline;
  std::string instance_digest;
  int k = 0;  // root services (FL: UponDeadline/UponCritical; MAD: transmissions; OSD: services)
  Rat f;      // FL opening cost (0 otherwise)
  int depth = 0;

  std::vector<Explore> explores;
  std::vector<Raise> raises;
  std::vector<Open> opens;
  std::vector<Connect> connects;
  std::vector<Serve> serves;
  std::vector<AddEdge> adds;
  std::vector<Transmit> transmissions;
  std::vector<Move> moves;
  std::vector<OsdService> osd_services;
  std::vector<PendingEntry> pending_entries;
  std::map<int, Rat> cumulative;  // final cumulative counters per element
  Rat cumulative_root;            // virtual root counter (FL)

  CostBreakdown reported_cost;

  int next_seq = 0;
  int seq() { return next_seq++; }
};

// Recomputes every cost in a trace from first principles (tree distances,
// delay curves, facility cost) without trusting the per-event cost fields,
// and re-checks validity: each request served exactly once while pending,
// deadline runs serve by the deadline, connection targets carry an open
// facility at the connection instant.
CostBreakdown audit_trace(const Instance& inst, const Tree& tree, const Trace& tr);

}  // namespace md
