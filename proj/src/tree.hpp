#pragma once

#include <string>
#include <vector>

#include "rational.hpp"

namespace md {

// Rooted tree with positive rational edge weights. An edge is identified with
// its bottom (child) node: edge(u) = (parent(u), u). Node ids are dense; the
// root has no edge. Immutable after build(); safe to share across threads.
class Tree {
 public:
  struct Node {
    int parent = -1;
    Rat weight;  // weight of the edge above this node; unused for the root
    std::vector<int> children;
  };

  Tree() = default;
  Tree(int n, int root, const std::vector<int>& parent,
       const std::vector<Rat>& weight);

  int size() const { return (int)nodes_.size(); }
  int root() const { return root_; }
  int parent(int u) const { return nodes_[u].parent; }
  const Rat& weight(int u) const { return nodes_[u].weight; }
  const std::vector<int>& children(int u) const { return nodes_[u].children; }
  bool is_leaf(int u) const { return nodes_[u].children.empty(); }
  bool is_root(int u) const { return u == root_; }

  int depth(int u) const { return depth_[u]; }
  // Height of a node: max number of edges on a path down to a leaf.
  int node_height(int u) const { return height_[u]; }
  // Height h_e of edge u: depth of the subtree rooted at that edge.
  int edge_height(int u) const { return height_[u] + 1; }
  // Depth D of the instance: height of the root element. For a tree rooted at
  // a single root edge this equals the root edge's height.
  int problem_depth() const { return height_[root_]; }

  const std::vector<int>& leaves() const { return leaves_; }

  bool is_ancestor_node(int anc, int u) const;  // inclusive
  // Edge a is an ancestor edge of edge b (inclusive).
  bool is_ancestor_edge(int a, int b) const {
    return is_ancestor_node(a, b);
  }
  // u lies in the subtree T_e of edge e (nodes strictly below e's top node).
  bool in_edge_subtree(int e, int u) const { return is_ancestor_node(e, u); }

  int lca(int u, int v) const;
  Rat dist(int u, int v) const;
  // Distance from an ancestor node down to a descendant node.
  Rat dist_to_ancestor(int u, int anc) const;

  // Total weight of the union of paths from the root element down to the
  // given leaves. For an edge-rooted element the element's own weight is
  // always included (also when `leaf_nodes` is empty); for a node-rooted
  // element the empty set weighs 0. Every leaf must lie under the element.
  Rat spanned_weight_node(int u, const std::vector<int>& leaf_nodes) const;
  Rat spanned_weight_edge(int e, const std::vector<int>& leaf_nodes) const;

  // All nodes of the subtree under node u (preorder, includes u).
  std::vector<int> subtree_nodes(int u) const;

  std::string describe_edge(int e) const;

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<int> depth_;
  std::vector<int> height_;
  std::vector<int> leaves_;
};

struct HstViolation {
  int parent_edge = -1;
  int child_edge = -1;
  std::string message;
};

struct HstCertificate {
  Rat beta;
  bool is_pow2 = false;
};

// Certificate iff every parent/child edge pair satisfies w(e) >= beta*w(e').
// Monotone in beta: a certificate at beta implies one at any beta' <= beta.
std::optional<HstViolation> validate_hst(const Tree& t, const Rat& beta);
HstCertificate hst_certificate(const Tree& t, const Rat& beta);

// Symmetric finite metric with exact rational distances.
struct MetricSpace {
  std::vector<std::vector<Rat>> dist;

  int size() const { return (int)dist.size(); }
};

struct MetricViolation {
  int a = -1, b = -1, c = -1;
  std::string message;
};

std::optional<MetricViolation> validate_metric(const MetricSpace& m);

}  // namespace md
