#include "gen.hpp"

#include <algorithm>
#include <set>

#include "prng.hpp"

namespace md {

namespace {

// Random (>=2)-HST shape: leaves distributed over a tree whose level-d edges
// all weigh base * 2^(depth-d); ratios are exactly 2. With pow2 base the
// weights are powers of two (wanted by the osd loader anyway).
Tree random_hst(Prng& rng, int leaves, int max_depth, bool single_root_edge,
                Rat* top_weight) {
  int depth = std::min(std::max(2, max_depth),
                       2 + (int)rng.below((uint64_t)std::max(1, max_depth - 1)));
  std::vector<int> parents = {-1};
  std::vector<int> level = {0};
  std::vector<Rat> weights = {Rat(0)};
  Rat base(1);

  auto edge_weight = [&](int lvl) {
    Rat w = base;
    for (int i = lvl; i < depth; ++i) w *= 2;
    return w;
  };

  // Start with a root chain or fanout, then keep attaching leaves.
  std::vector<int> open;  // nodes that may take children
  int root_kids = single_root_edge ? 1 : 1 + (int)rng.below(3);
  for (int i = 0; i < root_kids; ++i) {
    parents.push_back(0);
    level.push_back(1);
    weights.push_back(edge_weight(1));
    open.push_back((int)parents.size() - 1);
  }
  // Grow internal structure.
  int internal_budget = std::max(0, leaves / 2);
  for (int i = 0; i < internal_budget && !open.empty(); ++i) {
    int at = open[(size_t)rng.below(open.size())];
    if (level[at] >= depth) continue;
    parents.push_back(at);
    level.push_back(level[at] + 1);
    weights.push_back(edge_weight(level[at] + 1));
    open.push_back((int)parents.size() - 1);
  }
  // Attach the leaves: each leaf hangs under some open node strictly above
  // the bottom level.
  std::vector<int> shallow;
  for (int x : open)
    if (level[x] < depth) shallow.push_back(x);
  std::vector<int> leaf_ids;
  for (int i = 0; i < leaves; ++i) {
    int at = shallow[(size_t)rng.below(shallow.size())];
    int node = at;
    // descend to the bottom level with fresh internal nodes as needed
    while (level[node] < depth - 1 && rng.below(2) == 0) {
      parents.push_back(node);
      level.push_back(level[node] + 1);
      weights.push_back(edge_weight(level[node] + 1));
      node = (int)parents.size() - 1;
    }
    parents.push_back(node);
    level.push_back(level[node] + 1);
    weights.push_back(edge_weight(level[node] + 1));
    leaf_ids.push_back((int)parents.size() - 1);
  }
  if (top_weight) *top_weight = edge_weight(1);
  return Tree((int)parents.size(), 0, parents, weights);
}

Tree random_general_tree(Prng& rng, int leaves, int max_depth) {
  // Single root edge, arbitrary positive rational weights.
  std::vector<int> parents = {-1, 0};
  std::vector<int> level = {0, 1};
  std::vector<Rat> weights = {Rat(0), rng.rat_range(1, 16, 4)};
  std::vector<int> open = {1};
  for (int i = 0; i < leaves; ++i) {
    int at = open[(size_t)rng.below(open.size())];
    int node = at;
    while (level[node] < max_depth - 1 && rng.below(3) == 0) {
      parents.push_back(node);
      level.push_back(level[node] + 1);
      weights.push_back(rng.rat_range(1, 16, 4));
      node = (int)parents.size() - 1;
      open.push_back(node);
    }
    parents.push_back(node);
    level.push_back(level[node] + 1);
    weights.push_back(rng.rat_range(1, 16, 4));
  }
  return Tree((int)parents.size(), 0, parents, weights);
}

}  // namespace

Instance gen_instance(const GenSpec& spec) {
  Prng rng(spec.seed ^ 0x6d64656c61796765ULL);
  Instance inst;
  inst.problem = problem_from_name(spec.problem);
  inst.name = spec.kind + "-" + spec.problem + "-n" + std::to_string(spec.n) +
              "-q" + std::to_string(spec.requests) + "-s" +
              std::to_string(spec.seed);

  bool deadline_profile = spec.profile == "deadline-uniform";
  if (!deadline_profile && spec.profile != "linear-slopes" &&
      spec.profile != "bursty-coalitions")
    throw Error("unknown delay profile: " + spec.profile);
  if (deadline_profile != (inst.problem == Problem::FlDeadline))
    throw Error("profile " + spec.profile + " does not fit problem " +
                spec.problem);

  std::vector<int> leaves;
  Rat top_weight(0);
  if (spec.kind == "random-hst") {
    bool single_root = inst.problem == Problem::Mad;
    inst.tree = random_hst(rng, spec.n, spec.max_depth, single_root, &top_weight);
    leaves = inst.tree->leaves();
  } else if (spec.kind == "random-tree") {
    inst.tree = random_general_tree(rng, spec.n, spec.max_depth);
    leaves = inst.tree->leaves();
  } else if (spec.kind == "random-euclidean") {
    std::vector<std::pair<Rat, Rat>> pts;
    std::set<std::pair<std::string, std::string>> seen;
    while ((int)pts.size() < spec.n) {
      Rat x(rng.range(0, 1 << 10), 1 << 10);
      Rat y(rng.range(0, 1 << 10), 1 << 10);
      auto key = std::make_pair(rat_str(x), rat_str(y));
      if (seen.insert(key).second) pts.emplace_back(x, y);
    }
    inst.points = std::move(pts);
    for (int i = 0; i < spec.n; ++i) leaves.push_back(i);
  } else {
    throw Error("unknown generator kind: " + spec.kind);
  }

  if (inst.problem == Problem::FlDeadline || inst.problem == Problem::FlDelay) {
    if (inst.tree) {
      // Path weight from the root is at most twice the heaviest top edge.
      Rat path_max(0);
      for (int leaf : inst.tree->leaves())
        path_max = rat_max(path_max,
                           inst.tree->dist_to_ancestor(leaf, inst.tree->root()));
      inst.f = path_max * Rat(8 + (long)rng.below(5), 8);
    } else {
      // Every embedding of this metric keeps root-to-leaf paths below eight
      // diameters, so such an f survives the load-time checks for any seed.
      Rat dmax(0);
      const auto& pts = *inst.points;
      for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
          Rat dx = pts[i].first - pts[j].first, dy = pts[i].second - pts[j].second;
          if (dx < 0) dx = -dx;
          if (dy < 0) dy = -dy;
          dmax = rat_max(dmax, dx + dy);
        }
      if (dmax == 0) dmax = 1;
      inst.f = 8 * dmax * Rat(8 + (long)rng.below(5), 8);
    }
  }
  if (inst.problem == Problem::Osd) {
    inst.server_start = leaves[(size_t)rng.below(leaves.size())];
  }

  // Requests.
  long horizon = 64;
  std::set<std::string> used_deadlines;
  int id = 0;
  auto add_request = [&](int leaf, Rat release, bool bursty) {
    Request q;
    q.id = id++;
    q.leaf = leaf;
    q.release = release;
    if (deadline_profile) {
      Rat d = release + rng.rat_range(1, 24, 4);
      // The analysis assumes distinct deadlines; nudge collisions apart.
      while (!used_deadlines.insert(rat_str(d)).second) d += Rat(1, 64 + q.id);
      q.delay = Deadline{d};
    } else {
      PiecewiseDelay d;
      d.breakpoints = {{release, Rat(0)}};
      if (rng.below(3) == 0) {
        // One flat-then-rising kink.
        d.breakpoints.push_back({release + rng.rat_range(1, 6, 2), Rat(0)});
      }
      d.final_slope = bursty ? Rat(1 + (long)rng.below(4), 8)
                             : Rat(1 + (long)rng.below(16), 4);
      q.delay = std::move(d);
    }
    inst.requests.push_back(std::move(q));
  };

  if (spec.profile == "bursty-coalitions") {
    int remaining = spec.requests;
    while (remaining > 0) {
      int leaf = leaves[(size_t)rng.below(leaves.size())];
      int burst = std::min<long>(remaining, 2 + (long)rng.below(4));
      Rat around(rng.range(0, horizon), 1);
      for (int i = 0; i < burst; ++i)
        add_request(leaf, around + Rat((long)rng.below(8), 8), true);
      remaining -= burst;
    }
  } else {
    for (int i = 0; i < spec.requests; ++i)
      add_request(leaves[(size_t)rng.below(leaves.size())],
                  Rat(rng.range(0, horizon * 4), 4), false);
  }
  std::sort(inst.requests.begin(), inst.requests.end(),
            [](const Request& a, const Request& b) { return a.id < b.id; });
  validate_instance(inst);
  return inst;
}

}  // namespace md
