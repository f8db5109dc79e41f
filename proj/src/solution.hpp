#pragma once

#include <map>
#include <vector>

#include "instance.hpp"
#include "trace.hpp"

namespace md {

// An offline solution for any of the four problems, used both for oracle
// outputs and for the solutions the online runs themselves produce. Costs are
// never trusted as stored; verify_solution recomputes them.
struct OfflineSolution {
  Problem problem = Problem::FlDeadline;

  struct Opening {
    Rat t;
    int node = -1;
  };
  struct Assignment {  // FL: request -> facility opening
    Rat t;
    int node = -1;
  };
  struct Transmission {  // MAD
    Rat t;
    std::vector<int> edges;  // must be connected and contain the root edge
  };
  struct Move {  // OSD: relocate the server at time t
    Rat t;
    int to = -1;
  };

  std::vector<Opening> openings;
  std::map<int, Assignment> assignments;     // FL
  std::vector<Transmission> transmissions;   // MAD
  std::vector<Move> moves;                   // OSD, sorted by time
  std::map<int, Rat> serve_time;             // delay problems: request -> time
  int server_start = -1;                     // OSD

  CostBreakdown cost;
};

// Recomputes the cost components and checks feasibility: every request served
// within [r_q, d_q] (deadline problems) or at a time with the serving
// structure in place (delay problems). Throws on infeasibility; returns the
// recomputed costs.
CostBreakdown verify_solution(const Instance& inst, const Tree& tree,
                              const OfflineSolution& sol);

// OSD server position just before time t (moves at exactly t not applied).
int osd_position_before(const OfflineSolution& sol, const Rat& t);

// Converts a run's own output into an OfflineSolution, so that every check
// phrased against "any feasible solution" can also be run against the
// algorithm itself.
OfflineSolution solution_from_trace(const Instance& inst, const Tree& tree,
                                    const Trace& tr);

}  // namespace md
