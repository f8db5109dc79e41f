#include "solution.hpp"

#include <algorithm>
#include <set>

namespace md {

namespace {

void check_transmission_shape(const Tree& tree, const std::vector<int>& edges) {
  if (edges.empty()) throw Error("empty transmission");
  std::set<int> in(edges.begin(), edges.end());
  int root_children = 0;
  for (int e : edges) {
    if (e < 0 || e >= tree.size() || tree.is_root(e))
      throw Error("transmission contains a non-edge");
    int p = tree.parent(e);
    if (tree.is_root(p))
      ++root_children;
    else if (!in.count(p))
      throw Error("transmission is not connected to the root");
  }
  if (root_children == 0) throw Error("transmission does not touch the root");
}

}  // namespace

int osd_position_before(const OfflineSolution& sol, const Rat& t) {
  int pos = sol.server_start;
  for (const auto& m : sol.moves) {
    if (m.t >= t) break;
    pos = m.to;
  }
  return pos;
}

CostBreakdown verify_solution(const Instance& inst, const Tree& tree,
                              const OfflineSolution& sol) {
  CostBreakdown cost{Rat(0), Rat(0), Rat(0)};
  std::map<int, const Request*> req;
  for (const auto& q : inst.requests) req[q.id] = &q;

  switch (sol.problem) {
    case Problem::FlDeadline:
    case Problem::FlDelay: {
      const Rat& f = inst.opening_cost();
      cost.buy = f * (long)sol.openings.size();
      std::set<std::pair<std::string, int>> open_at;
      for (const auto& o : sol.openings) open_at.insert({rat_str(o.t), o.node});
      for (const auto& [id, q] : req) {
        auto it = sol.assignments.find(id);
        if (it == sol.assignments.end())
          throw Error("offline solution leaves request " + std::to_string(id) +
                      " unserved");
        const auto& a = it->second;
        if (!open_at.count({rat_str(a.t), a.node}))
          throw Error("request assigned to a facility that was never opened");
        if (a.t < q->release) throw Error("request connected before release");
        if (sol.problem == Problem::FlDeadline) {
          if (a.t > q->deadline()) throw Error("request connected after deadline");
        } else {
          cost.delay += delay_at(*q, a.t);
        }
        cost.connect += tree.dist(q->leaf, a.node);
      }
      break;
    }
    case Problem::Mad: {
      for (const auto& tx : sol.transmissions) {
        check_transmission_shape(tree, tx.edges);
        for (int e : tx.edges) cost.buy += tree.weight(e);
      }
      for (const auto& [id, q] : req) {
        auto it = sol.serve_time.find(id);
        if (it == sol.serve_time.end())
          throw Error("offline solution leaves request " + std::to_string(id) +
                      " unserved");
        const Rat& t = it->second;
        if (t < q->release) throw Error("request served before release");
        bool covered = false;
        for (const auto& tx : sol.transmissions)
          if (tx.t == t &&
              std::find(tx.edges.begin(), tx.edges.end(), q->leaf) != tx.edges.end())
            covered = true;
        if (!covered)
          throw Error("no transmission covers the request at its serve time");
        cost.delay += delay_at(*q, t);
      }
      break;
    }
    case Problem::Osd: {
      if (sol.server_start < 0) throw Error("osd solution needs server_start");
      for (size_t i = 1; i < sol.moves.size(); ++i)
        if (sol.moves[i].t < sol.moves[i - 1].t)
          throw Error("osd moves must be sorted by time");
      int pos = sol.server_start;
      for (const auto& m : sol.moves) {
        cost.buy += tree.dist(pos, m.to);
        pos = m.to;
      }
      for (const auto& [id, q] : req) {
        auto it = sol.serve_time.find(id);
        if (it == sol.serve_time.end())
          throw Error("offline solution leaves request " + std::to_string(id) +
                      " unserved");
        const Rat& t = it->second;
        if (t < q->release) throw Error("request served before release");
        // The server must stand on (or pass through) the leaf at time t.
        bool reachable = false;
        int at = sol.server_start;
        if (at == q->leaf && (sol.moves.empty() || t <= sol.moves.front().t) &&
            t >= q->release)
          reachable = true;
        for (size_t i = 0; i < sol.moves.size() && !reachable; ++i) {
          at = sol.moves[i].to;
          if (at != q->leaf) continue;
          Rat arrive = sol.moves[i].t;
          bool last = i + 1 == sol.moves.size();
          if (arrive <= t && (last || t <= sol.moves[i + 1].t)) reachable = true;
        }
        if (!reachable)
          throw Error("osd solution serves a request away from the server");
        cost.delay += delay_at(*q, t);
      }
      break;
    }
  }
  return cost;
}

OfflineSolution solution_from_trace(const Instance& inst, const Tree& tree,
                                    const Trace& tr) {
  OfflineSolution sol;
  sol.problem = tr.problem;
  switch (tr.problem) {
    case Problem::FlDeadline:
    case Problem::FlDelay: {
      // A run's facility serves across its exploration's forwarded window; as
      // an offline solution it becomes a momentary facility at the window's
      // last connection time.
      std::map<int, Rat> open_time;  // explore id -> time
      for (const auto& o : tr.opens) open_time[o.explore] = o.t;
      for (const auto& c : tr.connects)
        open_time[c.explore] = rat_max(open_time[c.explore], c.t);
      for (const auto& o : tr.opens)
        sol.openings.push_back({open_time[o.explore], o.node});
      for (const auto& c : tr.connects) {
        sol.assignments[c.request] = {open_time[c.explore], c.node};
        sol.serve_time[c.request] = open_time[c.explore];
      }
      break;
    }
    case Problem::Mad: {
      std::map<int, Rat> service_time;
      for (const auto& tx : tr.transmissions) {
        OfflineSolution::Transmission t;
        t.t = tx.t;
        t.edges = tx.concrete_edges.empty() ? tx.edges : tx.concrete_edges;
        service_time[tx.service] = tx.t;
        sol.transmissions.push_back(std::move(t));
      }
      for (const auto& s : tr.serves) sol.serve_time[s.request] = service_time.at(s.service);
      break;
    }
    case Problem::Osd: {
      sol.server_start = *inst.server_start;
      for (const auto& m : tr.moves) sol.moves.push_back({m.t, m.to});
      std::map<int, Rat> service_end;
      for (const auto& s : tr.osd_services) service_end[s.index] = s.t_end;
      for (const auto& s : tr.serves)
        sol.serve_time[s.request] =
            s.service >= 0 ? service_end.at(s.service) : s.t;
      break;
    }
  }
  sol.cost = verify_solution(inst, tree, sol);
  return sol;
}

}  // namespace md
