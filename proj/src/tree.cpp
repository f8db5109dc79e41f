#include "tree.hpp"

#include <algorithm>
#include <functional>

namespace md {

Tree::Tree(int n, int root, const std::vector<int>& parent,
           const std::vector<Rat>& weight) {
  if (n <= 0) throw Error("tree needs at least one node");
  if (root < 0 || root >= n) throw Error("bad root id");
  if ((int)parent.size() != n || (int)weight.size() != n)
    throw Error("tree arrays must have one entry per node");
  nodes_.resize(n);
  root_ = root;
  for (int u = 0; u < n; ++u) {
    nodes_[u].parent = parent[u];
    if (u == root) {
      if (parent[u] != -1) throw Error("root must have parent -1");
      continue;
    }
    if (parent[u] < 0 || parent[u] >= n || parent[u] == u)
      throw Error("bad parent for node " + std::to_string(u));
    if (weight[u] <= 0)
      throw Error("edge weight must be positive at node " + std::to_string(u));
    nodes_[u].weight = weight[u];
    nodes_[parent[u]].children.push_back(u);
  }
  for (auto& nd : nodes_) std::sort(nd.children.begin(), nd.children.end());

  depth_.assign(n, -1);
  height_.assign(n, 0);
  // Iterative DFS; also detects cycles / unreachable nodes.
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack = {root_};
  depth_[root_] = 0;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    order.push_back(u);
    for (int c : nodes_[u].children) {
      if (depth_[c] != -1) throw Error("tree contains a cycle");
      depth_[c] = depth_[u] + 1;
      stack.push_back(c);
    }
  }
  if ((int)order.size() != n) throw Error("tree has unreachable nodes");
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int u = *it;
    int h = 0;
    for (int c : nodes_[u].children) h = std::max(h, height_[c] + 1);
    height_[u] = h;
    if (nodes_[u].children.empty()) leaves_.push_back(u);
  }
  std::sort(leaves_.begin(), leaves_.end());
}

bool Tree::is_ancestor_node(int anc, int u) const {
  while (u != -1 && depth_[u] >= depth_[anc]) {
    if (u == anc) return true;
    u = nodes_[u].parent;
  }
  return false;
}

int Tree::lca(int u, int v) const {
  while (depth_[u] > depth_[v]) u = nodes_[u].parent;
  while (depth_[v] > depth_[u]) v = nodes_[v].parent;
  while (u != v) {
    u = nodes_[u].parent;
    v = nodes_[v].parent;
  }
  return u;
}

Rat Tree::dist(int u, int v) const {
  int a = lca(u, v);
  return dist_to_ancestor(u, a) + dist_to_ancestor(v, a);
}

Rat Tree::dist_to_ancestor(int u, int anc) const {
  Rat d(0);
  while (u != anc) {
    if (u == root_) throw Error("dist_to_ancestor: not an ancestor");
    d += nodes_[u].weight;
    u = nodes_[u].parent;
  }
  return d;
}

Rat Tree::spanned_weight_node(int u, const std::vector<int>& leaf_nodes) const {
  std::vector<char> seen(nodes_.size(), 0);
  Rat total(0);
  for (int leaf : leaf_nodes) {
    if (!is_ancestor_node(u, leaf))
      throw Error("request leaf outside the queried subtree");
    int x = leaf;
    while (x != u && !seen[x]) {
      seen[x] = 1;
      total += nodes_[x].weight;
      x = nodes_[x].parent;
    }
  }
  return total;
}

Rat Tree::spanned_weight_edge(int e, const std::vector<int>& leaf_nodes) const {
  // The root element of T_e is the edge e itself; its weight always counts.
  std::vector<int> below;
  below.reserve(leaf_nodes.size());
  for (int leaf : leaf_nodes) {
    if (!in_edge_subtree(e, leaf))
      throw Error("request leaf outside the queried edge subtree");
    if (leaf != e) below.push_back(leaf);
  }
  return nodes_[e].weight + spanned_weight_node(e, below);
}

std::vector<int> Tree::subtree_nodes(int u) const {
  std::vector<int> out, stack = {u};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    out.push_back(x);
    for (int c : nodes_[x].children) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Tree::describe_edge(int e) const {
  return "(" + std::to_string(parent(e)) + "," + std::to_string(e) + ")";
}

std::optional<HstViolation> validate_hst(const Tree& t, const Rat& beta) {
  for (int u = 0; u < t.size(); ++u) {
    if (t.is_root(u)) continue;
    for (int c : t.children(u)) {
      if (t.weight(u) >= beta * t.weight(c)) continue;
      HstViolation v;
      v.parent_edge = u;
      v.child_edge = c;
      v.message = "edge " + t.describe_edge(u) + " of weight " +
                  rat_str(t.weight(u)) + " is lighter than " + rat_str(beta) +
                  " x child edge " + t.describe_edge(c) + " of weight " +
                  rat_str(t.weight(c));
      return v;
    }
  }
  return std::nullopt;
}

HstCertificate hst_certificate(const Tree& t, const Rat& beta) {
  if (auto v = validate_hst(t, beta))
    throw Error("not a (>=" + rat_str(beta) + ")-HST: " + v->message);
  HstCertificate cert;
  cert.beta = beta;
  cert.is_pow2 = true;
  for (int u = 0; u < t.size(); ++u)
    if (!t.is_root(u) && !is_pow2(t.weight(u))) cert.is_pow2 = false;
  return cert;
}

std::optional<MetricViolation> validate_metric(const MetricSpace& m) {
  int n = m.size();
  for (int i = 0; i < n; ++i)
    if ((int)m.dist[i].size() != n)
      return MetricViolation{i, -1, -1, "distance matrix is not square"};
  for (int i = 0; i < n; ++i) {
    if (m.dist[i][i] != 0)
      return MetricViolation{i, i, -1, "nonzero diagonal"};
    for (int j = 0; j < n; ++j) {
      if (m.dist[i][j] < 0) return MetricViolation{i, j, -1, "negative distance"};
      if (m.dist[i][j] != m.dist[j][i])
        return MetricViolation{i, j, -1, "asymmetric distance"};
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (m.dist[i][k] > m.dist[i][j] + m.dist[j][k])
          return MetricViolation{
              i, j, k,
              "triangle inequality fails: d(" + std::to_string(i) + "," +
                  std::to_string(k) + ") > d(" + std::to_string(i) + "," +
                  std::to_string(j) + ") + d(" + std::to_string(j) + "," +
                  std::to_string(k) + ")"};
  return std::nullopt;
}

}  // namespace md
