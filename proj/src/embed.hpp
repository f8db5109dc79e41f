#pragma once

#include <cstdint>

#include "instance.hpp"
#include "tree.hpp"

namespace md {

struct EmbeddingResult {
  Tree hst;                   // (>=2)-HST, leaves bijective to metric points
  std::vector<int> leaf_map;  // point index -> leaf node id
  uint64_t seed = 0;
};

// Random-shift hierarchical decomposition into a 2-HST followed by a
// depth-compression pass that splices single-child chains (keeping the top
// edge weight of each spliced chain). Dominance holds unconditionally:
// delta_T(x,y) >= delta_X(x,y) for every pair and every seed, and the result
// is a (>=2)-HST of depth bounded by the (post-compression) aspect ratio.
// Zero off-diagonal distances are rejected; deduplicate first.
EmbeddingResult frt_embed(const MetricSpace& m, uint64_t seed);

struct ForestDecomposition {
  // virtual_parent[e] = the nearest strict ancestor whose weight is at least
  // twice w(e), or -1 when e is the root edge of a virtual tree.
  std::vector<int> virtual_parent;          // indexed by edge (node) id
  std::vector<int> roots;                   // virtual root edges, ascending
  std::vector<std::vector<int>> tree_edges; // per virtual tree, ascending
  std::vector<int> tree_of;                 // edge -> virtual tree index
  // B_e: the real-tree path from e up to (excluding) its virtual parent; for
  // virtual roots, up to and including the real root edge.
  std::vector<std::vector<int>> b_path;
};

// Decomposes a tree rooted at a single root edge into a virtual forest of
// (>=2)-HSTs over the same edge set.
ForestDecomposition forest_decompose(const Tree& t);

// Each weight rounded up to the nearest power of two. Reports (via the flag)
// whether the (>=2)-HST property survived; rounding up cannot break it on a
// valid input.
Tree round_weights_pow2(const Tree& t, bool* still_hst = nullptr);

// Embeds a metric-form instance into a tree-form one (identical requests,
// relocated onto the HST leaves). Duplicate points are merged before the
// embedding; leaf_of_point maps every original point to its leaf.
struct EmbeddedInstance {
  Instance instance;
  std::vector<int> leaf_of_point;
  uint64_t seed = 0;
};
EmbeddedInstance embed_instance(const Instance& inst, uint64_t seed);

}  // namespace md
