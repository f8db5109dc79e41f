#include "preflow.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace md {

std::vector<Rat> PreflowGraph::excesses() const {
  std::vector<Rat> chi(node_count, Rat(0));
  for (const auto& e : edges) {
    chi[e.to] += e.alpha;
    chi[e.from] -= e.alpha;
  }
  return chi;
}

Rat PreflowGraph::omega() const { return -excesses()[source]; }

PreflowCheck check_preflow(const PreflowGraph& g) {
  PreflowCheck c;
  auto chi = g.excesses();
  c.excess_sum = 0;
  for (const auto& x : chi) c.excess_sum += x;
  if (c.excess_sum != 0) {
    c.ok = false;
    c.message = "excess sum is " + rat_str(c.excess_sum) + ", expected 0";
    return c;
  }
  for (int v = 0; v < g.node_count; ++v) {
    if (v == g.source) continue;
    if (chi[v] < 0) {
      c.ok = false;
      c.first_negative = v;
      c.message = "node " + std::to_string(v) + " has negative excess " +
                  rat_str(chi[v]);
      return c;
    }
  }
  return c;
}

namespace {

struct IntervalSet {
  // Explore entry times of one element, strictly increasing.
  std::vector<Rat> times;
  std::vector<int> explore_ids;  // aligned with times
  int first_charging_index = -1;  // index of this element's interval 0

  int interval_count() const { return (int)times.size() + 1; }
};

bool in_interval(const ChargingNode& n, const Rat& t, bool half_open) {
  if (n.tau1 && t < *n.tau1) return false;
  if (n.tau2) {
    if (half_open ? t >= *n.tau2 : t > *n.tau2) return false;
  }
  return true;
}

}  // namespace

FlPreflow build_fl_preflow(const Instance& inst, const Tree& tree, const Trace& tr,
                           const OfflineSolution& offline, bool delay_variant) {
  if (tr.problem != (delay_variant ? Problem::FlDelay : Problem::FlDeadline))
    throw Error("preflow builder: trace problem kind mismatch");
  if (offline.problem != tr.problem)
    throw Error("preflow builder: offline solution kind mismatch");
  if (!tr.instance_digest.empty()) {
    // Digest checks happen in the CLI, where files come from disk.
  }
  const Rat f = tr.f;

  // Interval structure per element.
  std::map<int, IntervalSet> per_elem;
  for (const auto& x : tr.explores) {
    auto& iv = per_elem[x.elem];
    if (!iv.times.empty() && x.t_enter <= iv.times.back())
      throw Error(
          "preflow builder requires strictly increasing exploration times per "
          "node (tie-broken instances are out of scope)");
    iv.times.push_back(x.t_enter);
    iv.explore_ids.push_back(x.id);
  }

  FlPreflow pf;
  for (int u = 0; u < tree.size(); ++u) {
    auto& iv = per_elem[u];  // may be empty: single (-inf, inf) node
    iv.first_charging_index = (int)pf.nodes.size();
    int m = (int)iv.times.size();
    for (int i = 0; i <= m; ++i) {
      ChargingNode n;
      n.elem = u;
      n.is_root_elem = tree.is_root(u);
      if (i > 0) {
        n.tau1 = iv.times[i - 1];
        n.explore_starting = iv.explore_ids[i - 1];
      }
      if (i < m) n.tau2 = iv.times[i];
      pf.nodes.push_back(n);
    }
  }
  int N = (int)pf.nodes.size();
  pf.graph.node_count = N + 1;
  pf.graph.source = 0;
  auto gid = [](int node_index) { return node_index + 1; };

  auto node_of_phase = [&](int elem, long phase) {
    const auto& iv = per_elem.at(elem);
    long idx = phase;
    if (idx > (long)iv.times.size()) throw Error("phase beyond interval range");
    return iv.first_charging_index + (int)idx;
  };
  auto node_of_explore_start = [&](int explore_id) {
    const auto& x = tr.explores[explore_id];
    const auto& iv = per_elem.at(x.elem);
    for (size_t i = 0; i < iv.explore_ids.size(); ++i)
      if (iv.explore_ids[i] == explore_id)
        return iv.first_charging_index + (int)i + 1;
    throw Error("exploration missing from interval set");
  };

  // Possible edges: one per (investing exploration, receiving counter phase)
  // pair, directed from the receiving phase's charging node to the investing
  // exploration's charging node, weighted by the total amount.
  std::map<std::pair<int, int>, Rat> possible;  // (from node, to node) -> alpha
  for (const auto& r : tr.raises) {
    int to = node_of_explore_start(r.explore);
    int from = node_of_phase(r.target, r.target_phase);
    possible[{from, to}] += r.amount;
  }

  // Incurred costs c_b, c_c (and c_d for the delay variant).
  pf.cost_buy.assign(N, Rat(0));
  pf.cost_connect.assign(N, Rat(0));
  pf.cost_delay.assign(N, Rat(0));
  std::map<int, const Request*> req;
  for (const auto& q : inst.requests) req[q.id] = &q;

  for (int i = 0; i < N; ++i) {
    const auto& n = pf.nodes[i];
    for (const auto& o : offline.openings)
      if (tree.is_ancestor_node(n.elem, o.node) &&
          in_interval(n, o.t, delay_variant))
        pf.cost_buy[i] += f;
    for (const auto& [qid, asg] : offline.assignments) {
      const Request* q = req.at(qid);
      if (!tree.is_ancestor_node(n.elem, q->leaf)) continue;
      if (!in_interval(n, q->release, delay_variant)) continue;
      if (tree.is_ancestor_node(n.elem, asg.node)) continue;  // inside T_u
      // delta(p(u), v_q); for the root element nothing lies outside.
      if (tree.is_root(n.elem)) continue;
      pf.cost_connect[i] += tree.dist_to_ancestor(q->leaf, tree.parent(n.elem));
    }
    if (delay_variant) {
      for (const auto& [qid, when] : offline.serve_time) {
        const Request* q = req.at(qid);
        if (!tree.is_ancestor_node(n.elem, q->leaf)) continue;
        if (!in_interval(n, q->release, true)) continue;
        pf.cost_delay[i] += delay_at(*q, when);
      }
    }
  }

  // Initialization: Special colors and source edges.
  pf.color.assign(N, kColorNone);
  for (int i = 0; i < N; ++i)
    if (pf.cost_buy[i] > 0) pf.color[i] = kColorSpecial;
  for (int i = 0; i < N; ++i) {
    Rat c = pf.cost_buy[i] + pf.cost_connect[i] + pf.cost_delay[i];
    if (c > 0) pf.graph.add_edge(0, gid(i), c);
  }

  // lambda per charging node (from the exploration starting the interval).
  std::vector<MaybeTime> lambda(N);
  for (int i = 0; i < N; ++i)
    if (pf.nodes[i].explore_starting >= 0)
      lambda[i] = tr.explores[pf.nodes[i].explore_starting].lambda;

  // The added-edge set E grows as nodes get colored: coloring mu adds every
  // possible edge incoming to mu (the investments made by the exploration
  // starting mu's interval).
  std::set<std::pair<int, int>> added;
  auto set_color = [&](int mu, int color_ref) {
    // color_ref: a root charging node index (only root colors propagate).
    if (color_ref == kColorNone || color_ref == kColorSpecial)
      return pf.color[mu];
    const auto& star = pf.nodes[color_ref];
    if (pf.color[mu] == kColorNone && pf.nodes[mu].tau1.has_value() &&
        lambda[mu].has_value() && star.tau2.has_value() &&
        *lambda[mu] <= *star.tau2) {
      for (const auto& [key, alpha] : possible)
        if (key.second == mu && !added.count(key)) {
          added.insert(key);
          pf.graph.add_edge(gid(key.first), gid(key.second), alpha);
        }
      pf.color[mu] = color_ref;
    }
    return pf.color[mu];
  };

  // Root color creation: the k finite root charging nodes in time order.
  const auto& root_iv = per_elem.at(tree.root());
  for (int i = 0; i < (int)root_iv.times.size(); ++i) {
    int mu = root_iv.first_charging_index + i;
    pf.root_nodes.push_back(mu);
    set_color(mu, mu);
  }

  // Depth-ordered propagation.
  int D = tr.depth;
  for (int depth = 1; depth <= D; ++depth) {
    for (int u = 0; u < tree.size(); ++u) {
      if (tree.depth(u) != depth) continue;
      const auto& iv = per_elem.at(u);
      for (int i = 0; i < iv.interval_count(); ++i) {
        int mu = iv.first_charging_index + i;
        // Outgoing added edges of mu lead to the colored investors above.
        std::vector<int> targets;
        for (const auto& key : added)
          if (key.first == mu) targets.push_back(key.second);
        std::sort(targets.begin(), targets.end());
        for (int to : targets)
          if (set_color(mu, pf.color[to]) != kColorNone) break;
      }
    }
  }

  pf.omega = pf.graph.omega();
  return pf;
}

ChargingBoundsReport verify_charging_bounds(const FlPreflow& pf,
                                            const CostBreakdown& offline_cost,
                                            int k, const Rat& f, int depth) {
  ChargingBoundsReport rep;
  auto check = check_preflow(pf.graph);
  rep.excess_sum_zero = check.excess_sum == 0;
  rep.preflow_valid = check.ok;
  if (!check.ok) rep.message = check.message;

  auto chi = pf.graph.excesses();
  rep.root_excesses_ok = (int)pf.root_nodes.size() == k;
  if (!rep.root_excesses_ok)
    rep.message += " root charging node count differs from k;";
  for (int mu : pf.root_nodes)
    if (chi[mu + 1] < f) {
      rep.root_excesses_ok = false;
      rep.message += " root charging node " + std::to_string(mu) +
                     " has excess " + rat_str(chi[mu + 1]) + " < f;";
    }

  rep.charge_sum = 0;
  for (size_t i = 0; i < pf.nodes.size(); ++i)
    rep.charge_sum += pf.cost_buy[i] + pf.cost_connect[i] + pf.cost_delay[i];
  rep.bound_rhs =
      Rat(2 * (depth + 1)) * offline_cost.buy + 4 * offline_cost.connect;
  rep.charge_bound_ok = rep.charge_sum <= rep.bound_rhs;
  rep.kf = Rat(k) * f;
  rep.kf_bound_ok = rep.kf <= rep.bound_rhs;
  if (!rep.charge_bound_ok) rep.message += " total incurred cost exceeds bound;";
  if (!rep.kf_bound_ok) rep.message += " kf exceeds bound;";
  return rep;
}

}  // namespace md
