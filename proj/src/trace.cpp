#include "trace.hpp"

#include <algorithm>
#include <set>

namespace md {

CostBreakdown audit_trace(const Instance& inst, const Tree& tree, const Trace& tr) {
  CostBreakdown cost{Rat(0), Rat(0), Rat(0)};
  std::map<int, const Request*> req;
  for (const auto& q : inst.requests) req[q.id] = &q;

  std::map<int, Rat> served_at;
  for (const auto& s : tr.serves) {
    if (!req.count(s.request)) throw Error("trace serves unknown request");
    if (served_at.count(s.request)) throw Error("request served twice in trace");
    served_at[s.request] = s.t;
    const Request& q = *req[s.request];
    if (s.t < q.release) throw Error("request served before release");
    Rat d = q.has_deadline() ? Rat(0) : delay_at(q, s.t);
    if (d != s.delay_paid) throw Error("trace delay disagrees with the curve");
    cost.delay += d;
  }
  for (const auto& [id, q] : req) {
    if (!served_at.count(id)) throw Error("request never served");
    if (q->has_deadline() && served_at[id] > q->deadline())
      throw Error("request pending past its deadline");
  }

  switch (tr.problem) {
    case Problem::FlDeadline:
    case Problem::FlDelay: {
      cost.buy = tr.f * (long)tr.opens.size();
      // A facility stays available to its own exploration: every connection
      // must target the node its exploration opened, within that
      // exploration's time window.
      std::map<int, int> opened_by_explore;
      for (const auto& o : tr.opens) opened_by_explore[o.explore] = o.node;
      for (const auto& c : tr.connects) {
        const Request& q = *req.at(c.request);
        if (!tree.is_ancestor_node(c.node, q.leaf))
          throw Error("connection target is not an ancestor of the leaf");
        Rat d = tree.dist_to_ancestor(q.leaf, c.node);
        if (d != c.cost) throw Error("connection cost disagrees with the tree");
        auto it = opened_by_explore.find(c.explore);
        if (it == opened_by_explore.end() || it->second != c.node)
          throw Error("connection without an open facility at that node");
        const auto& x = tr.explores.at(c.explore);
        if (c.t < x.t_enter || c.t > x.t_return)
          throw Error("connection outside its exploration's window");
        if (c.t != served_at.at(c.request))
          throw Error("connect and serve times disagree");
        cost.connect += d;
      }
      if (tr.connects.size() != req.size())
        throw Error("every request must be connected exactly once");
      break;
    }
    case Problem::Mad: {
      for (const auto& tx : tr.transmissions) {
        Rat w(0);
        for (int e : tx.edges) w += tree.weight(e);
        if (w != tx.weight) throw Error("transmission weight disagrees");
        // Use the concretization when present (general-tree runs).
        if (!tx.concrete_edges.empty()) {
          Rat cw(0);
          for (int e : tx.concrete_edges) cw += tree.weight(e);
          if (cw != tx.concrete_weight)
            throw Error("concrete transmission weight disagrees");
          cost.buy += cw;
        } else {
          cost.buy += w;
        }
      }
      break;
    }
    case Problem::Osd: {
      for (const auto& m : tr.moves) {
        if (tree.dist(m.from, m.to) != m.cost)
          throw Error("movement segment cost disagrees with distance");
        cost.buy += m.cost;
      }
      break;
    }
  }

  if (cost.buy != tr.reported_cost.buy || cost.connect != tr.reported_cost.connect ||
      cost.delay != tr.reported_cost.delay)
    throw Error("independent cost audit disagrees with the run's bookkeeping");
  return cost;
}

}  // namespace md
