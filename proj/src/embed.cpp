#include "embed.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "prng.hpp"

namespace md {

namespace {

struct Cluster {
  std::vector<int> points;  // ascending
  int level = 0;
  std::vector<int> children;  // indices into the cluster arena
  int tree_node = -1;
};

}  // namespace

EmbeddingResult frt_embed(const MetricSpace& m, uint64_t seed) {
  int n = m.size();
  if (n < 1) throw Error("embedding needs at least one point");
  if (auto v = validate_metric(m)) throw Error("invalid metric: " + v->message);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m.dist[i][j] == 0)
        throw Error("duplicate points (zero distance); deduplicate first");

  EmbeddingResult out;
  out.seed = seed;
  if (n == 1) {
    out.hst = Tree(2, 0, {-1, 0}, {Rat(0), Rat(1)});
    out.leaf_map = {1};
    return out;
  }

  Rat dmin, dmax;
  bool first = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Rat& d = m.dist[i][j];
      if (first || d < dmin) dmin = d;
      if (first || d > dmax) dmax = d;
      first = false;
    }

  Prng rng(seed);
  // Random shift beta in [1,2) and a random center permutation.
  Rat beta = Rat(64 + (long)rng.below(64), 64);
  std::vector<int> pi(n);
  std::iota(pi.begin(), pi.end(), 0);
  rng.shuffle(pi);

  // radius(l) = beta * 2^(l-1) * s with s = dmin/2, so level 0 always splits
  // every pair. Top level L: radius(L) >= dmax.
  Rat s = dmin / 2;
  auto radius = [&](int l) {
    Rat r = beta * s / 2;
    for (int i = 0; i < l; ++i) r *= 2;
    return r;
  };
  int top = 0;
  while (radius(top) < dmax) ++top;

  std::vector<Cluster> arena;
  {
    Cluster all;
    all.points.resize(n);
    std::iota(all.points.begin(), all.points.end(), 0);
    all.level = top;
    arena.push_back(std::move(all));
  }
  // Split level by level; singletons stop early.
  std::vector<int> frontier = {0};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int ci : frontier) {
      if ((int)arena[ci].points.size() <= 1) continue;
      int child_level = arena[ci].level - 1;
      Rat r = radius(child_level);
      // First permutation center within distance r claims each point;
      // centers range over all points, not only the cluster's.
      std::map<int, std::vector<int>> parts;  // center order index -> points
      for (int p : arena[ci].points) {
        int owner = -1;
        for (int oi = 0; oi < n; ++oi)
          if (m.dist[pi[oi]][p] <= r) {
            owner = oi;
            break;
          }
        parts[owner].push_back(p);
      }
      for (auto& [owner, pts] : parts) {
        Cluster c;
        c.points = std::move(pts);
        c.level = child_level;
        arena.push_back(std::move(c));
        arena[ci].children.push_back((int)arena.size() - 1);
        next.push_back((int)arena.size() - 1);
      }
    }
    frontier = std::move(next);
  }

  // Edge weight into a level-l cluster: beta * 2^l * s. Two such edges under
  // a common level-(l+1) cluster exactly dominate its diameter 2*radius(l+1).
  auto edge_weight = [&](int child_level) {
    Rat w = beta * s;
    for (int i = 0; i < child_level; ++i) w *= 2;
    return w;
  };

  // Depth compression: splice single-child internal clusters, keeping the
  // weight of the top edge of each spliced chain (the child cluster inherits
  // its topmost ancestor chain edge).
  // Build parent/weight arrays over clusters first.
  int cn = (int)arena.size();
  std::vector<int> cparent(cn, -1);
  std::vector<Rat> cweight(cn, Rat(0));
  for (int i = 0; i < cn; ++i)
    for (int c : arena[i].children) {
      cparent[c] = i;
      cweight[c] = edge_weight(arena[c].level);
    }
  for (int i = 0; i < cn; ++i) {
    if (arena[i].children.size() != 1 || cparent[i] == -1) continue;
    // Splice i: its only child hangs from i's parent with i's edge weight.
    int child = arena[i].children[0];
    int par = cparent[i];
    cparent[child] = par;
    cweight[child] = cweight[i];
    auto& pc = arena[par].children;
    std::replace(pc.begin(), pc.end(), i, child);
  }
  // The root may also start a single-child chain; drop root chains entirely
  // (the child becomes the root).
  int root_cluster = 0;
  while (arena[root_cluster].children.size() == 1)
    root_cluster = arena[root_cluster].children[0];

  // Canonical node numbering: preorder with children ordered by smallest
  // contained point, so identical (metric, seed) gives an identical tree.
  std::vector<int> order;
  std::vector<int> stack = {root_cluster};
  while (!stack.empty()) {
    int ci = stack.back();
    stack.pop_back();
    order.push_back(ci);
    auto kids = arena[ci].children;
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
      return arena[a].points.front() > arena[b].points.front();
    });
    for (int k : kids) stack.push_back(k);
  }
  std::map<int, int> node_of;
  for (size_t i = 0; i < order.size(); ++i) node_of[order[i]] = (int)i;
  int nn = (int)order.size();
  std::vector<int> parent(nn, -1);
  std::vector<Rat> weight(nn, Rat(0));
  for (int ci : order) {
    if (ci == root_cluster) continue;
    parent[node_of[ci]] = node_of[cparent[ci]];
    weight[node_of[ci]] = cweight[ci];
  }
  out.hst = Tree(nn, 0, parent, weight);
  out.leaf_map.assign(n, -1);
  for (int ci : order)
    if (arena[ci].children.empty()) {
      if (arena[ci].points.size() != 1)
        throw Error("internal: non-singleton leaf cluster");
      out.leaf_map[arena[ci].points[0]] = node_of[ci];
    }
  for (int p = 0; p < n; ++p)
    if (out.leaf_map[p] < 0) throw Error("internal: point lost in embedding");
  return out;
}

ForestDecomposition forest_decompose(const Tree& t) {
  if (t.children(t.root()).size() != 1)
    throw Error("forest decomposition needs a tree rooted at a single root edge");
  int root_edge = t.children(t.root()).front();
  ForestDecomposition fd;
  int n = t.size();
  fd.virtual_parent.assign(n, -1);
  fd.tree_of.assign(n, -1);
  fd.b_path.assign(n, {});

  for (int e = 0; e < n; ++e) {
    if (t.is_root(e)) continue;
    // Nearest strict ancestor carrying at least twice this edge's weight.
    int a = t.parent(e);
    int vp = -1;
    std::vector<int> skipped = {e};
    while (!t.is_root(a)) {
      if (t.weight(a) >= 2 * t.weight(e)) {
        vp = a;
        break;
      }
      skipped.push_back(a);
      a = t.parent(a);
    }
    fd.virtual_parent[e] = vp;
    if (vp == -1) {
      // Virtual root: B_e runs all the way up to and including the root edge.
      fd.b_path[e] = skipped;  // e plus every skipped ancestor, root edge incl.
    } else {
      fd.b_path[e] = skipped;  // e up to but excluding the virtual parent
    }
  }
  (void)root_edge;

  // Group edges into virtual trees by following virtual parents upward.
  std::map<int, int> tree_index_of_root;
  for (int e = 0; e < n; ++e) {
    if (t.is_root(e)) continue;
    int x = e;
    while (fd.virtual_parent[x] != -1) x = fd.virtual_parent[x];
    auto it = tree_index_of_root.find(x);
    int idx;
    if (it == tree_index_of_root.end()) {
      idx = (int)fd.roots.size();
      tree_index_of_root[x] = idx;
      fd.roots.push_back(x);
      fd.tree_edges.emplace_back();
    } else {
      idx = it->second;
    }
    fd.tree_of[e] = idx;
    fd.tree_edges[idx].push_back(e);
  }
  for (auto& edges : fd.tree_edges) std::sort(edges.begin(), edges.end());
  return fd;
}

Tree round_weights_pow2(const Tree& t, bool* still_hst) {
  std::vector<int> parent(t.size());
  std::vector<Rat> weight(t.size(), Rat(0));
  for (int u = 0; u < t.size(); ++u) {
    parent[u] = t.parent(u);
    if (!t.is_root(u)) weight[u] = pow2_ceil(t.weight(u));
  }
  Tree out(t.size(), t.root(), parent, weight);
  if (still_hst) *still_hst = !validate_hst(out, Rat(2)).has_value();
  return out;
}

EmbeddedInstance embed_instance(const Instance& inst, uint64_t seed) {
  if (inst.has_tree()) throw Error("instance is already in tree form");
  MetricSpace m;
  if (inst.metric) {
    m = *inst.metric;
  } else if (inst.points) {
    int n = (int)inst.points->size();
    m.dist.assign(n, std::vector<Rat>(n, Rat(0)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rat dx = (*inst.points)[i].first - (*inst.points)[j].first;
        Rat dy = (*inst.points)[i].second - (*inst.points)[j].second;
        if (dx < 0) dx = -dx;
        if (dy < 0) dy = -dy;
        m.dist[i][j] = dx + dy;
      }
  } else {
    throw Error("instance has no metric data");
  }

  // Merge duplicate points onto representatives before embedding.
  int n = m.size();
  std::vector<int> rep(n);
  std::iota(rep.begin(), rep.end(), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (m.dist[i][j] == 0) {
        rep[i] = rep[j];
        break;
      }
  std::vector<int> uniq;
  std::vector<int> uniq_index(n, -1);
  for (int i = 0; i < n; ++i)
    if (rep[i] == i) {
      uniq_index[i] = (int)uniq.size();
      uniq.push_back(i);
    }
  MetricSpace mu;
  mu.dist.assign(uniq.size(), std::vector<Rat>(uniq.size(), Rat(0)));
  for (size_t i = 0; i < uniq.size(); ++i)
    for (size_t j = 0; j < uniq.size(); ++j)
      mu.dist[i][j] = m.dist[uniq[i]][uniq[j]];

  EmbeddingResult emb = frt_embed(mu, seed);
  EmbeddedInstance out;
  out.seed = seed;
  out.leaf_of_point.assign(n, -1);
  for (int p = 0; p < n; ++p)
    out.leaf_of_point[p] = emb.leaf_map[uniq_index[rep[p]]];

  out.instance = inst;
  out.instance.metric.reset();
  out.instance.points.reset();
  out.instance.tree = std::move(emb.hst);
  for (auto& q : out.instance.requests) q.leaf = out.leaf_of_point[q.leaf];
  if (inst.server_start)
    out.instance.server_start = out.leaf_of_point[*inst.server_start];
  if (inst.problem == Problem::Osd)
    out.instance.tree = round_weights_pow2(*out.instance.tree);
  return out;
}

}  // namespace md
