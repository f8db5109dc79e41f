#include "oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace md {

namespace {

std::vector<const Request*> request_ptrs(const Instance& inst) {
  std::vector<const Request*> out;
  for (const auto& q : inst.requests) out.push_back(&q);
  return out;
}

// All facility candidates: every tree node.
Rat group_location_cost(const Tree& t, const std::vector<const Request*>& group,
                        int* best_node) {
  Rat best;
  int arg = -1;
  for (int u = 0; u < t.size(); ++u) {
    Rat c(0);
    for (const Request* q : group) c += t.dist(q->leaf, u);
    if (arg == -1 || c < best) {
      best = c;
      arg = u;
    }
  }
  *best_node = arg;
  return best;
}

// Enumerate set partitions via restricted growth strings.
template <typename F>
void for_each_partition(int n, F&& f) {
  std::vector<int> rgs(n, 0);
  while (true) {
    f(rgs);
    int i = n - 1;
    for (; i > 0; --i) {
      int maxp = *std::max_element(rgs.begin(), rgs.begin() + i);
      if (rgs[i] <= maxp) {
        ++rgs[i];
        std::fill(rgs.begin() + i + 1, rgs.end(), 0);
        break;
      }
    }
    if (i == 0) break;
  }
}

OfflineSolution fl_deadline_partition_search(const Instance& inst,
                                             bool enumerate_times) {
  const Tree& t = inst.the_tree();
  const Rat& f = inst.opening_cost();
  auto reqs = request_ptrs(inst);
  int n = (int)reqs.size();
  if (n > 8) throw Error("exact facility-location oracle capped at 8 requests");

  OfflineSolution best;
  bool have = false;
  Rat best_total;

  std::vector<Rat> all_deadlines;
  for (const Request* q : reqs) all_deadlines.push_back(q->deadline());
  std::sort(all_deadlines.begin(), all_deadlines.end());
  all_deadlines.erase(std::unique(all_deadlines.begin(), all_deadlines.end()),
                      all_deadlines.end());

  auto consider = [&](const std::vector<int>& rgs) {
    int groups = n == 0 ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
    OfflineSolution sol;
    sol.problem = Problem::FlDeadline;
    Rat total(0);
    for (int g = 0; g < groups; ++g) {
      std::vector<const Request*> group;
      for (int i = 0; i < n; ++i)
        if (rgs[i] == g) group.push_back(reqs[i]);
      Rat min_deadline = group.front()->deadline();
      Rat max_release = group.front()->release;
      for (const Request* q : group) {
        min_deadline = rat_min(min_deadline, q->deadline());
        max_release = rat_max(max_release, q->release);
      }
      std::vector<Rat> times;
      if (enumerate_times) {
        for (const Rat& d : all_deadlines)
          if (d >= max_release && d <= min_deadline) times.push_back(d);
      } else {
        if (max_release <= min_deadline) times.push_back(min_deadline);
      }
      if (times.empty()) return;  // infeasible grouping
      int node = -1;
      Rat c = group_location_cost(t, group, &node);
      // Service time does not change the cost; take the earliest candidate.
      Rat when = times.front();
      sol.openings.push_back({when, node});
      for (const Request* q : group) {
        sol.assignments[q->id] = {when, node};
        sol.serve_time[q->id] = when;
      }
      total += f + c;
    }
    if (!have || total < best_total) {
      have = true;
      best_total = total;
      best = std::move(sol);
    }
  };

  if (n == 0) {
    best.problem = Problem::FlDeadline;
    have = true;
  } else {
    for_each_partition(n, consider);
  }
  if (!have) throw Error("no feasible offline solution found");
  best.cost = verify_solution(inst, t, best);
  return best;
}

}  // namespace

OfflineSolution opt_fl_deadline_exact(const Instance& inst) {
  if (inst.problem != Problem::FlDeadline)
    throw Error("opt_fl_deadline_exact needs an fl-deadline instance");
  return fl_deadline_partition_search(inst, false);
}

OfflineSolution opt_fl_deadline_raw(const Instance& inst) {
  if (inst.problem != Problem::FlDeadline)
    throw Error("opt_fl_deadline_raw needs an fl-deadline instance");
  if (inst.requests.size() > 4)
    throw Error("raw facility-location oracle capped at 4 requests");
  return fl_deadline_partition_search(inst, true);
}

namespace {

std::vector<Rat> build_grid(const Instance& inst, int refine) {
  std::vector<Rat> grid;
  for (const auto& q : inst.requests) {
    grid.push_back(q.release);
    if (q.has_deadline()) {
      grid.push_back(q.deadline());
    } else {
      for (const auto& bp : q.curve().breakpoints) grid.push_back(bp.first);
    }
  }
  if (grid.empty()) grid.push_back(Rat(0));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (refine > 0) {
    std::vector<Rat> extra;
    for (size_t i = 0; i + 1 < grid.size(); ++i)
      for (int j = 1; j <= refine; ++j)
        extra.push_back(grid[i] + (grid[i + 1] - grid[i]) * Rat(j, refine + 1));
    grid.insert(grid.end(), extra.begin(), extra.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  return grid;
}

Rat group_delay(const std::vector<const Request*>& group, const Rat& t) {
  Rat d(0);
  for (const Request* q : group) d += delay_at(*q, t);
  return d;
}

// Best single-service cost for every request subset, then a partition DP over
// subsets. Shared by the fl-delay and mad grid oracles.
struct SubsetService {
  Rat cost;
  Rat when;
  int node = -1;            // FL facility
  bool feasible = false;
};

OfflineSolution grid_fl(const Instance& inst, const std::vector<Rat>& grid,
                        long state_limit) {
  const Tree& t = inst.the_tree();
  const Rat& f = inst.opening_cost();
  auto reqs = request_ptrs(inst);
  int n = (int)reqs.size();
  bool deadline = inst.problem == Problem::FlDeadline;
  long states = (long)(1L << n) * (long)grid.size() * (long)t.size();
  if (n > 20 || states > state_limit)
    throw Error("grid oracle state space too large (about " +
                std::to_string(states) + " states)");

  int full = (1 << n) - 1;
  std::vector<SubsetService> best(full + 1);
  for (int mask = 1; mask <= full; ++mask) {
    std::vector<const Request*> group;
    Rat max_release, min_deadline;
    bool first = true;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        group.push_back(reqs[i]);
        if (first || reqs[i]->release > max_release) max_release = reqs[i]->release;
        if (deadline && (first || reqs[i]->deadline() < min_deadline))
          min_deadline = reqs[i]->deadline();
        first = false;
      }
    SubsetService& b = best[mask];
    for (const Rat& when : grid) {
      if (when < max_release) continue;
      if (deadline && when > min_deadline) break;
      int node = -1;
      Rat c = group_location_cost(t, group, &node);
      Rat total = f + c + (deadline ? Rat(0) : group_delay(group, when));
      if (!b.feasible || total < b.cost) {
        b.feasible = true;
        b.cost = total;
        b.when = when;
        b.node = node;
      }
      if (deadline) break;  // cost is time-independent; earliest works
    }
  }

  // Partition DP over submasks.
  std::vector<Rat> dp(full + 1);
  std::vector<int> choice(full + 1, 0);
  std::vector<char> ok(full + 1, false);
  ok[0] = true;
  for (int mask = 1; mask <= full; ++mask) {
    int low = mask & (-mask);
    for (int sub = mask; sub; sub = (sub - 1) & mask) {
      if (!(sub & low)) continue;  // canonical: group containing lowest bit
      if (!best[sub].feasible || !ok[mask ^ sub]) continue;
      Rat cand = best[sub].cost + dp[mask ^ sub];
      if (!ok[mask] || cand < dp[mask]) {
        ok[mask] = true;
        dp[mask] = cand;
        choice[mask] = sub;
      }
    }
  }
  if (!ok[full]) throw Error("grid oracle found no feasible solution");

  OfflineSolution sol;
  sol.problem = inst.problem;
  for (int mask = full; mask;) {
    int sub = choice[mask];
    const auto& b = best[sub];
    sol.openings.push_back({b.when, b.node});
    for (int i = 0; i < n; ++i)
      if (sub & (1 << i)) {
        sol.assignments[reqs[i]->id] = {b.when, b.node};
        sol.serve_time[reqs[i]->id] = b.when;
      }
    mask ^= sub;
  }
  sol.cost = verify_solution(inst, t, sol);
  return sol;
}

OfflineSolution grid_mad(const Instance& inst, const std::vector<Rat>& grid,
                         long state_limit) {
  const Tree& t = inst.the_tree();
  auto reqs = request_ptrs(inst);
  int n = (int)reqs.size();
  long states = (long)(1L << n) * (long)grid.size();
  if (n > 20 || states > state_limit)
    throw Error("grid oracle state space too large (about " +
                std::to_string(states) + " states)");
  if (t.children(t.root()).size() != 1)
    throw Error("mad oracle needs a single root edge");
  int root_edge = t.children(t.root()).front();

  int full = (1 << n) - 1;
  std::vector<SubsetService> best(full + 1);
  for (int mask = 1; mask <= full; ++mask) {
    std::vector<const Request*> group;
    std::vector<int> leaves;
    Rat max_release;
    bool first = true;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        group.push_back(reqs[i]);
        leaves.push_back(reqs[i]->leaf);
        if (first || reqs[i]->release > max_release) max_release = reqs[i]->release;
        first = false;
      }
    Rat w = t.spanned_weight_edge(root_edge, leaves);
    SubsetService& b = best[mask];
    for (const Rat& when : grid) {
      if (when < max_release) continue;
      Rat total = w + group_delay(group, when);
      if (!b.feasible || total < b.cost) {
        b.feasible = true;
        b.cost = total;
        b.when = when;
      }
    }
  }

  std::vector<Rat> dp(full + 1);
  std::vector<int> choice(full + 1, 0);
  std::vector<char> ok(full + 1, false);
  ok[0] = true;
  for (int mask = 1; mask <= full; ++mask) {
    int low = mask & (-mask);
    for (int sub = mask; sub; sub = (sub - 1) & mask) {
      if (!(sub & low)) continue;
      if (!best[sub].feasible || !ok[mask ^ sub]) continue;
      Rat cand = best[sub].cost + dp[mask ^ sub];
      if (!ok[mask] || cand < dp[mask]) {
        ok[mask] = true;
        dp[mask] = cand;
        choice[mask] = sub;
      }
    }
  }
  if (n > 0 && !ok[full]) throw Error("grid oracle found no feasible solution");

  OfflineSolution sol;
  sol.problem = Problem::Mad;
  for (int mask = full; mask;) {
    int sub = choice[mask];
    const auto& b = best[sub];
    std::vector<int> leaves;
    for (int i = 0; i < n; ++i)
      if (sub & (1 << i)) leaves.push_back(reqs[i]->leaf);
    // Transmit the spanned subtree.
    std::set<int> edges = {root_edge};
    for (int leaf : leaves)
      for (int x = leaf; x != root_edge; x = t.parent(x)) edges.insert(x);
    OfflineSolution::Transmission tx;
    tx.t = b.when;
    tx.edges.assign(edges.begin(), edges.end());
    sol.transmissions.push_back(std::move(tx));
    for (int i = 0; i < n; ++i)
      if (sub & (1 << i)) sol.serve_time[reqs[i]->id] = b.when;
    mask ^= sub;
  }
  // Merge same-time transmissions (cheaper than separate ones is not claimed;
  // feasibility only requires coverage at the serve time).
  sol.cost = verify_solution(inst, t, sol);
  return sol;
}

OfflineSolution grid_osd(const Instance& inst, const std::vector<Rat>& grid,
                         long state_limit) {
  const Tree& t = inst.the_tree();
  auto reqs = request_ptrs(inst);
  int n = (int)reqs.size();
  long states = (long)(1L << n) * (long)grid.size() * (long)t.size();
  if (n > 16 || states > state_limit)
    throw Error("grid oracle state space too large (about " +
                std::to_string(states) + " states)");

  int start = *inst.server_start;
  if (n == 0) {
    OfflineSolution sol;
    sol.problem = Problem::Osd;
    sol.server_start = start;
    sol.cost = verify_solution(inst, t, sol);
    return sol;
  }

  int G = (int)grid.size(), N = t.size(), full = (1 << n) - 1;
  std::vector<std::vector<Rat>> dmat(N, std::vector<Rat>(N));
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) dmat[a][b] = t.dist(a, b);

  // Dijkstra over (grid index, node, served mask). Several hops may happen
  // within one grid instant; waiting advances the grid index for free. A
  // state entry serves every released request co-located with the server,
  // paying its delay at that grid time.
  auto sid = [&](int gi, int node, int mask) {
    return ((long)gi * N + node) * (long)(full + 1) + mask;
  };
  auto serve_mask_at = [&](int gi, int node, int mask) {
    int m = mask;
    for (int i = 0; i < n; ++i)
      if (!(m & (1 << i)) && reqs[i]->leaf == node && reqs[i]->release <= grid[gi])
        m |= (1 << i);
    return m;
  };
  auto serve_cost = [&](int gi, int before, int after) {
    Rat c(0);
    for (int i = 0; i < n; ++i)
      if (!(before & (1 << i)) && (after & (1 << i)))
        c += delay_at(*reqs[i], grid[gi]);
    return c;
  };

  std::map<long, Rat> dist;
  std::map<long, long> from;
  using QE = std::pair<Rat, long>;
  auto cmp = [](const QE& a, const QE& b) { return a.first > b.first; };
  std::priority_queue<QE, std::vector<QE>, decltype(cmp)> pq(cmp);

  int m0 = serve_mask_at(0, start, 0);
  long s0 = sid(0, start, m0);
  dist[s0] = serve_cost(0, 0, m0);
  pq.push({dist[s0], s0});

  while (!pq.empty()) {
    auto [d, id] = pq.top();
    pq.pop();
    auto dit = dist.find(id);
    if (dit != dist.end() && dit->second < d) continue;
    int mask = (int)(id % (full + 1));
    int node = (int)((id / (full + 1)) % N);
    int gi = (int)(id / (full + 1) / N);
    if (mask == full) continue;
    auto relax = [&](int gi2, int node2, const Rat& extra) {
      int m2 = serve_mask_at(gi2, node2, mask);
      Rat cost = d + extra + serve_cost(gi2, mask, m2);
      long id2 = sid(gi2, node2, m2);
      auto it = dist.find(id2);
      if (it == dist.end() || cost < it->second) {
        dist[id2] = cost;
        from[id2] = id;
        pq.push({cost, id2});
      }
    };
    if (gi + 1 < G) relax(gi + 1, node, Rat(0));
    for (int v = 0; v < N; ++v)
      if (v != node) relax(gi, v, dmat[node][v]);
  }

  long best_goal = -1;
  Rat best_cost;
  for (auto& [id, d] : dist) {
    if ((int)(id % (full + 1)) != full) continue;
    if (best_goal < 0 || d < best_cost) {
      best_goal = id;
      best_cost = d;
    }
  }
  if (best_goal < 0) throw Error("grid oracle found no feasible osd solution");

  OfflineSolution sol;
  sol.problem = Problem::Osd;
  sol.server_start = start;
  std::vector<long> chain;
  for (long id = best_goal;;) {
    chain.push_back(id);
    auto it = from.find(id);
    if (it == from.end()) break;
    id = it->second;
  }
  std::reverse(chain.begin(), chain.end());
  int served_so_far = 0;
  int at = start;
  for (long id : chain) {
    int mask = (int)(id % (full + 1));
    int node = (int)((id / (full + 1)) % N);
    int gi = (int)(id / (full + 1) / N);
    if (node != at) {
      sol.moves.push_back({grid[gi], node});
      at = node;
    }
    for (int b = 0; b < n; ++b)
      if (!(served_so_far & (1 << b)) && (mask & (1 << b)))
        sol.serve_time[reqs[b]->id] = grid[gi];
    served_so_far = mask;
  }
  sol.cost = verify_solution(inst, t, sol);
  return sol;
}

}  // namespace

OfflineSolution opt_grid(const Instance& inst, const GridOptions& opt) {
  validate_instance(inst);
  auto grid = build_grid(inst, opt.refine);
  switch (inst.problem) {
    case Problem::FlDeadline:
    case Problem::FlDelay:
      return grid_fl(inst, grid, opt.state_limit);
    case Problem::Mad:
      return grid_mad(inst, grid, opt.state_limit);
    case Problem::Osd:
      return grid_osd(inst, grid, opt.state_limit);
  }
  throw Error("unknown problem");
}

Rat brute_saturation(const Tree& t, int edge, const RequestList& pending,
                     const Rat& at) {
  RequestList in;
  for (const Request* q : pending)
    if (t.is_ancestor_node(edge, q->leaf)) in.push_back(q);
  if (in.size() > 12) throw Error("brute_saturation capped at 12 pending requests");
  int n = (int)in.size();
  Rat best(0);
  for (int mask = 1; mask < (1 << n); ++mask) {
    Rat d(0);
    std::vector<int> leaves;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        d += delay_at(*in[i], at);
        leaves.push_back(in[i]->leaf);
      }
    Rat v = d - (t.spanned_weight_edge(edge, leaves) - t.weight(edge));
    if (v > best) best = v;
  }
  return best;
}

namespace {

void ancestor_closed_sets(const Tree& t, int u, std::vector<int>& current,
                          const std::vector<int>& candidates, size_t idx,
                          const std::function<void(const std::vector<int>&)>& f) {
  if (idx == candidates.size()) {
    f(current);
    return;
  }
  int node = candidates[idx];
  // Skip node.
  bool parent_in = node == u;
  if (!parent_in)
    parent_in = std::find(current.begin(), current.end(), t.parent(node)) !=
                current.end();
  ancestor_closed_sets(t, u, current, candidates, idx + 1, f);
  if (parent_in) {
    current.push_back(node);
    ancestor_closed_sets(t, u, current, candidates, idx + 1, f);
    current.pop_back();
  }
}

}  // namespace

Rat brute_psi(const Tree& t, int u, const RequestList& q, const Rat& f) {
  if (q.empty()) return 0;
  auto nodes = t.subtree_nodes(u);
  if (nodes.size() > 12) throw Error("brute_psi capped at 12 candidate nodes");
  // Candidates in preorder so that a node's parent is decided before it.
  std::vector<int> order;
  std::vector<int> stack = {u};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    order.push_back(x);
    for (int c : t.children(x)) stack.push_back(c);
  }
  Rat best;
  bool have = false;
  std::vector<int> current = {u};  // u itself is always open
  std::vector<int> rest(order.begin() + 1, order.end());
  ancestor_closed_sets(t, u, current, rest, 0,
                       [&](const std::vector<int>& s) {
                         Rat cost = f * (long)s.size();
                         for (const Request* r : q) {
                           // least ancestor of the leaf inside s
                           int x = r->leaf;
                           while (std::find(s.begin(), s.end(), x) == s.end())
                             x = t.parent(x);
                           cost += t.dist_to_ancestor(r->leaf, x);
                         }
                         if (!have || cost < best) {
                           have = true;
                           best = cost;
                         }
                       });
  return best;
}

Rat brute_fl_critical(const Tree& t, int u, const Rat& f,
                      const RequestList& pending, const Rat& at) {
  RequestList in;
  for (const Request* q : pending)
    if (t.is_ancestor_node(u, q->leaf)) in.push_back(q);
  int n = (int)in.size();
  if (n > 12) throw Error("brute_fl_critical capped at 12 pending requests");
  Rat best = -f;
  for (int mask = 1; mask < (1 << n); ++mask) {
    RequestList sub;
    Rat d(0);
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) {
        sub.push_back(in[i]);
        d += delay_at(*in[i], at);
      }
    Rat v = d - brute_psi(t, u, sub, f);
    if (v > best) best = v;
  }
  return best;
}

}  // namespace md
