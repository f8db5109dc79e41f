#include "instance.hpp"

#include <algorithm>
#include <map>

namespace md {

std::string problem_name(Problem p) {
  switch (p) {
    case Problem::FlDeadline: return "fl-deadline";
    case Problem::FlDelay: return "fl-delay";
    case Problem::Mad: return "mad";
    case Problem::Osd: return "osd";
  }
  throw Error("unknown problem");
}

Problem problem_from_name(const std::string& s) {
  if (s == "fl-deadline") return Problem::FlDeadline;
  if (s == "fl-delay") return Problem::FlDelay;
  if (s == "mad") return Problem::Mad;
  if (s == "osd") return Problem::Osd;
  throw Error("unknown problem kind: " + s);
}

Rat PiecewiseDelay::eval(const Rat& t) const {
  if (breakpoints.empty()) throw Error("delay curve without breakpoints");
  if (t < breakpoints.front().first)
    throw Error("delay evaluated before the release time");
  size_t i = breakpoints.size() - 1;
  while (i > 0 && breakpoints[i].first > t) --i;
  if (i + 1 < breakpoints.size()) {
    const auto& [t0, v0] = breakpoints[i];
    const auto& [t1, v1] = breakpoints[i + 1];
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }
  return breakpoints[i].second + final_slope * (t - breakpoints[i].first);
}

Rat PiecewiseDelay::crossing(const Rat& target, const Rat& t0) const {
  Rat lo = rat_max(t0, breakpoints.front().first);
  auto c = tail(lo).crossing(target);
  if (!c) throw Error("delay curve never reaches target (final slope 0?)");
  return *c;
}

PLFn PiecewiseDelay::tail(const Rat& t0) const {
  Rat lo = rat_max(t0, breakpoints.front().first);
  std::vector<std::pair<Rat, Rat>> pts;
  pts.emplace_back(lo, eval(lo));
  for (const auto& bp : breakpoints)
    if (bp.first > lo) pts.push_back(bp);
  return PLFn::from_points(std::move(pts), final_slope);
}

Rat delay_at(const Request& q, const Rat& t) {
  if (q.has_deadline())
    throw Error("delay_at on a deadline request (type error)");
  return q.curve().eval(t);
}

Rat delay_crossing(const Request& q, const Rat& target, const Rat& t0) {
  if (q.has_deadline())
    throw Error("crossing on a deadline request (type error)");
  return q.curve().crossing(target, t0);
}

void validate_instance(const Instance& inst) {
  bool needs_f = inst.problem == Problem::FlDeadline || inst.problem == Problem::FlDelay;
  if (needs_f) {
    if (!inst.f) throw Error("facility-location instance needs f");
    if (*inst.f <= 0) throw Error("f must be positive");
  }
  if (inst.problem == Problem::Osd && !inst.server_start)
    throw Error("osd instance needs server_start");

  // Request sanity, shared across forms.
  std::map<int, char> ids;
  for (const auto& q : inst.requests) {
    if (ids.count(q.id)) throw Error("duplicate request id " + std::to_string(q.id));
    ids[q.id] = 1;
    bool want_deadline = inst.problem == Problem::FlDeadline;
    if (want_deadline && !q.has_deadline())
      throw Error("fl-deadline requests must carry deadlines");
    if (!want_deadline && q.has_deadline())
      throw Error(problem_name(inst.problem) +
                  " requests must carry delay curves, not deadlines");
    if (q.has_deadline()) {
      if (q.deadline() < q.release)
        throw Error("deadline before release for request " + std::to_string(q.id));
    } else {
      const auto& c = q.curve();
      if (c.breakpoints.empty() || c.breakpoints.front().first != q.release ||
          c.breakpoints.front().second != 0)
        throw Error("delay curve must start at (release, 0) for request " +
                    std::to_string(q.id));
      for (size_t i = 1; i < c.breakpoints.size(); ++i) {
        if (c.breakpoints[i].first <= c.breakpoints[i - 1].first)
          throw Error("delay breakpoints must strictly increase in time");
        if (c.breakpoints[i].second < c.breakpoints[i - 1].second)
          throw Error("delay values must be non-decreasing");
      }
      if (c.final_slope <= 0)
        throw Error("delay curve needs a positive final slope");
    }
  }

  if (inst.has_tree()) {
    const Tree& t = *inst.tree;
    for (const auto& q : inst.requests) {
      if (q.leaf < 0 || q.leaf >= t.size())
        throw Error("request location out of range");
      if (!t.is_leaf(q.leaf))
        throw Error("requests only arrive on leaves of the tree (request " +
                    std::to_string(q.id) + ")");
    }
    if (needs_f) {
      const Rat& f = *inst.f;
      for (int u = 0; u < t.size(); ++u) {
        if (t.is_root(u)) continue;
        if (t.weight(u) > f)
          throw Error("assumption w(e) <= f violated at edge " +
                      t.describe_edge(u));
      }
      for (int leaf : t.leaves())
        if (t.dist_to_ancestor(leaf, t.root()) > f)
          throw Error(
              "assumption violated: total weight of a root-to-leaf path "
              "exceeds f");
    }
    if (inst.problem == Problem::Osd) {
      if (*inst.server_start < 0 || *inst.server_start >= t.size() ||
          !t.is_leaf(*inst.server_start))
        throw Error("osd server_start must be a leaf");
    }
  } else {
    if (!inst.metric && !inst.points)
      throw Error("instance has neither tree nor metric data");
    int n = inst.metric ? inst.metric->size() : (int)inst.points->size();
    for (const auto& q : inst.requests)
      if (q.leaf < 0 || q.leaf >= n)
        throw Error("request location out of range");
    if (inst.metric) {
      if (auto v = validate_metric(*inst.metric))
        throw Error("invalid metric: " + v->message);
    }
  }
}

std::vector<MadSubInstance> split_mad_instance(const Instance& inst) {
  const Tree& t = inst.the_tree();
  std::vector<MadSubInstance> out;
  for (int top : t.children(t.root())) {
    MadSubInstance sub;
    // Keep the original node under a fresh root so that `top` stays a single
    // root edge.
    std::vector<int> nodes = t.subtree_nodes(top);
    std::map<int, int> remap;
    int root_id = 0;
    remap[-1] = -1;
    std::vector<int> parent(nodes.size() + 1, -1);
    std::vector<Rat> weight(nodes.size() + 1, Rat(1));
    for (size_t i = 0; i < nodes.size(); ++i) remap[nodes[i]] = (int)i + 1;
    for (size_t i = 0; i < nodes.size(); ++i) {
      int u = nodes[i];
      parent[i + 1] = (u == top) ? root_id : remap[t.parent(u)];
      weight[i + 1] = t.weight(u);
    }
    sub.tree = Tree((int)nodes.size() + 1, root_id, parent, weight);
    for (const auto& q : inst.requests) {
      if (!remap.count(q.leaf) || !t.is_ancestor_node(top, q.leaf)) continue;
      Request r = q;
      r.leaf = remap[q.leaf];
      sub.request_ids.push_back(q.id);
      sub.requests.push_back(std::move(r));
    }
    out.push_back(std::move(sub));
  }
  return out;
}

}  // namespace md
