#pragma once

#include "embed.hpp"
#include "instance.hpp"
#include "trace.hpp"

namespace md {

// A rooted-edge view of (part of) a tree. The multilevel-aggregation explorer
// runs on such views: a plain subtree for MAD itself, and a promoted relative
// subtree when embedded in the service-with-delay algorithm.
struct MadView {
  const Tree* tree = nullptr;
  int root_edge = -1;
  std::vector<int> root_children;  // the root edge's child edges in the view
  bool promoted = false;           // true: root_children are sibling edges

  std::vector<int> children_of(int e) const {
    if (e == root_edge) return root_children;
    return tree->children(e);
  }
  int view_parent(int e) const;
  bool contains(int e) const;
  // All edges of the view (root first, then preorder).
  std::vector<int> edges() const;
};

MadView subtree_view(const Tree& t, int root_edge);
MadView relative_view(const Tree& t, int edge);  // promoted over lighter siblings

// One exploration pass of the multilevel-aggregation algorithm: grows a
// transmission tree from the view's root edge, investing w(e)-sized budgets
// into live-cut counters and recursing on filled counters. Mutates counters,
// the pending flags, the clock and the trace. Returns the explored edge set.
struct MadExplorerEnv {
  const Tree* tree = nullptr;
  std::vector<Rat>* counters = nullptr;
  std::vector<long>* phases = nullptr;
  std::vector<const Request*>* requests = nullptr;  // run-wide, index-aligned
  std::vector<char>* pending = nullptr;
  Trace* trace = nullptr;
  Rat* clock = nullptr;
  int service = -1;
};
std::vector<int> mad_explore(const MadView& view, MadExplorerEnv env);

struct MadSubRunStats {
  int root_edge = -1;    // in the run tree (virtual tree for general runs)
  Rat root_weight;
  int depth = 0;         // h of the root edge
  int k = 0;             // transmissions
  Rat virtual_buy;       // sum of transmitted (virtual) tree weights
  Rat concrete_buy;      // equals virtual_buy on HST runs
  Rat delay;
};

struct MadRunResult {
  Trace trace;
  CostBreakdown cost;
  int k = 0;  // total transmissions over all sub-runs
  std::vector<MadSubRunStats> subruns;
};

// Algorithm for (>=2)-HSTs. Instances whose root has several children split
// into independent per-root-edge sub-runs, merged into one trace.
MadRunResult run_mad_hst(const Instance& inst);

// General trees: decompose into a virtual forest of (>=2)-HSTs, run the HST
// algorithm per virtual tree, transmit concretizations. Requires a single
// root edge.
MadRunResult run_mad_general(const Instance& inst);

}  // namespace md
