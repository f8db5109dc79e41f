#include "mad_run.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "surplus.hpp"

namespace md {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw Error(std::string("internal invariant failed: ") + msg);
}

}  // namespace

int MadView::view_parent(int e) const {
  if (e == root_edge) return -1;
  for (int c : root_children)
    if (c == e) return root_edge;
  return tree->parent(e);
}

bool MadView::contains(int e) const {
  if (e == root_edge) return true;
  for (int c : root_children)
    if (tree->is_ancestor_edge(c, e)) return true;
  return false;
}

std::vector<int> MadView::edges() const {
  std::vector<int> out = {root_edge};
  for (int c : root_children) {
    auto sub = tree->subtree_nodes(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

MadView subtree_view(const Tree& t, int root_edge) {
  if (t.is_root(root_edge)) throw Error("view root must be an edge");
  MadView v;
  v.tree = &t;
  v.root_edge = root_edge;
  v.root_children = t.children(root_edge);
  v.promoted = false;
  return v;
}

MadView relative_view(const Tree& t, int edge) {
  MadView v;
  v.tree = &t;
  v.root_edge = edge;
  v.root_children = promoted_view(t, edge).siblings;
  v.promoted = true;
  return v;
}

namespace {

class MadExplorer {
 public:
  MadExplorer(const MadView& view, MadExplorerEnv env) : v_(view), env_(env) {}

  std::vector<int> run() {
    explore(v_.root_edge);
    std::vector<int> edges(included_.begin(), included_.end());
    std::sort(edges.begin(), edges.end());
    return edges;
  }

 private:
  const MadView& v_;
  MadExplorerEnv env_;
  std::set<int> included_;
  long guard_ = 0;

  const Tree& tree() const { return *env_.tree; }

  RequestList pending_list() const {
    RequestList out;
    for (size_t i = 0; i < env_.requests->size(); ++i)
      if ((*env_.pending)[i]) out.push_back((*env_.requests)[i]);
    return out;
  }

  bool pending_in_view_subtree(int e) const {
    for (size_t i = 0; i < env_.requests->size(); ++i) {
      if (!(*env_.pending)[i]) continue;
      int leaf = (*env_.requests)[i]->leaf;
      if (e == v_.root_edge) {
        for (int c : v_.root_children)
          if (tree().is_ancestor_node(c, leaf)) return true;
        if (!v_.promoted && tree().is_ancestor_node(e, leaf)) return true;
      } else if (tree().is_ancestor_node(e, leaf)) {
        return true;
      }
    }
    return false;
  }

  // Live cut under e: view edges below e, outside the transmission tree,
  // whose view parent is inside it.
  std::vector<int> live_cut(int e) const {
    std::vector<int> stack;
    std::vector<int> cut;
    for (int c : v_.children_of(e)) stack.push_back(c);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      if (!included_.count(x)) {
        // x's view parent is in the tree iff we reached x from an included
        // edge; by construction of this walk it is.
        cut.push_back(x);
        continue;
      }
      for (int c : v_.children_of(x)) stack.push_back(c);
    }
    std::sort(cut.begin(), cut.end());
    // A live cut is a cut: no member an ancestor of another.
    for (size_t i = 0; i < cut.size(); ++i)
      for (size_t j = 0; j < cut.size(); ++j)
        if (i != j) require(!tree().is_ancestor_edge(cut[i], cut[j]),
                            "live cut contains nested edges");
    return cut;
  }

  void add(int e) {
    included_.insert(e);
    env_.trace->adds.push_back({e, *env_.clock, env_.service, env_.trace->seq()});
    if (tree().is_leaf(e)) {
      for (size_t i = 0; i < env_.requests->size(); ++i) {
        if (!(*env_.pending)[i]) continue;
        const Request* q = (*env_.requests)[i];
        if (q->leaf != e) continue;
        if (v_.promoted && e == v_.root_edge) continue;  // outside R_e
        (*env_.pending)[i] = false;
        Rat d = delay_at(*q, *env_.clock);
        env_.trace->serves.push_back(
            {q->id, *env_.clock, d, env_.service, env_.trace->seq()});
      }
    }
  }

  void explore(int e) {
    add(e);
    Rat budget = tree().weight(e);
    while (budget != 0 && pending_in_view_subtree(e)) {
      if (++guard_ > 64L * (long)(env_.requests->size() + 4) *
                         (long)(tree().size() + 4))
        throw Error("mad explore exceeded its iteration budget");
      auto cut = live_cut(e);
      // Earliest saturation over the live cut; ties break by edge id.
      MaybeTime best;
      int target = -1;
      RequestList pl = pending_list();
      for (int h : cut) {
        auto c = earliest_saturation(tree(), h, pl, *env_.clock);
        if (c && (!best || *c < *best)) {
          best = c;
          target = h;
        }
      }
      require(best.has_value(), "no saturating cut edge despite pending requests");
      require(*best >= *env_.clock, "saturation time regressed");
      // The earliest-saturating cut edge receives the investment; the service
      // stays atomic at its trigger instant (the clock does not move).
      // Invest(e, e'): as much as fits.
      Rat room = tree().weight(target) - (*env_.counters)[target];
      Rat y = rat_min(budget, room);
      if (y > 0) {
        (*env_.counters)[target] += y;
        budget -= y;
        env_.trace->raises.push_back({current_explore_, target, y,
                                      (*env_.phases)[target], *env_.clock,
                                      env_.trace->seq()});
      }
      if ((*env_.counters)[target] == tree().weight(target)) {
        (*env_.counters)[target] = 0;
        ++(*env_.phases)[target];
        int saved = current_explore_;
        explore_child(target);
        current_explore_ = saved;
      }
    }
  }

  int current_explore_ = -1;

  void explore_child(int e) { explore_with_record(e); }

 public:
  void explore_with_record(int e) {
    Trace::Explore x;
    x.id = (int)env_.trace->explores.size();
    x.elem = e;
    x.t_enter = *env_.clock;
    x.parent = current_explore_;
    x.service = env_.service;
    x.enter_seq = env_.trace->seq();
    env_.trace->explores.push_back(x);
    current_explore_ = x.id;
    explore(e);
    auto& rec = env_.trace->explores[x.id];
    rec.t_return = *env_.clock;
    rec.return_seq = env_.trace->seq();
  }
};

}  // namespace

std::vector<int> mad_explore(const MadView& view, MadExplorerEnv env) {
  MadExplorer ex(view, env);
  ex.explore_with_record(view.root_edge);
  // Collect the edges added during this exploration from the trace tail.
  std::vector<int> edges;
  for (const auto& a : env.trace->adds)
    if (a.service == env.service) edges.push_back(a.edge);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

namespace {

// One independent multilevel-aggregation run over a single-root-edge view of
// `tree`, with its own clock and counters, appending to a shared trace.
struct MadSubRunner {
  const Tree& tree;
  MadView view;
  std::vector<const Request*> requests;  // sorted by (release, id)
  Trace& trace;
  int* service_counter;
  // Concretization hook for general-tree runs: maps a virtual transmission to
  // its real-tree edge set and that set's real weight.
  std::function<std::pair<std::vector<int>, Rat>(const std::vector<int>&)>
      concretize;

  MadSubRunStats run() {
    MadSubRunStats stats;
    stats.root_edge = view.root_edge;
    stats.root_weight = tree.weight(view.root_edge);
    stats.depth = tree.edge_height(view.root_edge);
    stats.virtual_buy = stats.concrete_buy = stats.delay = Rat(0);

    std::vector<Rat> counters(tree.size(), Rat(0));
    std::vector<long> phases(tree.size(), 0);
    std::vector<char> pending(requests.size(), false);
    size_t next_release = 0;
    Rat clock = requests.empty() ? Rat(0) : requests.front()->release;

    auto flush = [&](const Rat& t) {
      while (next_release < requests.size() &&
             requests[next_release]->release <= t) {
        pending[next_release] = true;
        trace.pending_entries.push_back(
            {requests[next_release]->id, t, trace.seq()});
        ++next_release;
      }
    };
    auto pending_list = [&]() {
      RequestList out;
      for (size_t i = 0; i < requests.size(); ++i)
        if (pending[i]) out.push_back(requests[i]);
      return out;
    };

    flush(clock);
    while (true) {
      MaybeTime next_rel;
      if (next_release < requests.size())
        next_rel = requests[next_release]->release;
      MaybeTime trigger =
          earliest_saturation(tree, view.root_edge, pending_list(), clock);
      if (!trigger && !next_rel) break;
      if (next_rel && (!trigger || *next_rel <= *trigger)) {
        clock = rat_max(clock, *next_rel);
        flush(clock);
        continue;
      }
      if (*trigger > clock) {
        // Waited triggers sit exactly on the saturation threshold.
        require(saturation_surplus(tree, view.root_edge, pending_list(),
                                   *trigger) == tree.weight(view.root_edge),
                "criticality crossing not tight");
        clock = *trigger;
      }
      int service = (*service_counter)++;
      size_t serves_before = trace.serves.size();
      MadExplorerEnv env;
      env.tree = &tree;
      env.counters = &counters;
      env.phases = &phases;
      env.requests = &requests;
      env.pending = &pending;
      env.trace = &trace;
      env.clock = &clock;
      env.service = service;
      auto edges = mad_explore(view, env);

      Trace::Transmit tx;
      tx.edges = edges;
      tx.weight = 0;
      for (int e : edges) tx.weight += tree.weight(e);
      tx.t = clock;
      tx.service = service;
      tx.served_count = (int)(trace.serves.size() - serves_before);
      require(tx.served_count >= 1, "a transmission served no request");
      if (concretize) {
        std::tie(tx.concrete_edges, tx.concrete_weight) = concretize(edges);
      } else {
        tx.concrete_weight = tx.weight;
      }
      for (size_t i = serves_before; i < trace.serves.size(); ++i)
        stats.delay += trace.serves[i].delay_paid;
      stats.virtual_buy += tx.weight;
      stats.concrete_buy += tx.concrete_weight;
      stats.k += 1;
      tx.seq = trace.seq();
      trace.transmissions.push_back(std::move(tx));
      flush(clock);
    }
    for (size_t i = 0; i < requests.size(); ++i)
      require(!pending[i], "request left unserved");
    require(next_release == requests.size(), "request left unreleased");
    return stats;
  }
};

std::vector<const Request*> sorted_requests(const std::vector<Request>& v) {
  std::vector<const Request*> out;
  for (const auto& q : v) out.push_back(&q);
  std::sort(out.begin(), out.end(), [](const Request* a, const Request* b) {
    if (a->release != b->release) return a->release < b->release;
    return a->id < b->id;
  });
  return out;
}

}  // namespace

MadRunResult run_mad_hst(const Instance& inst) {
  if (inst.problem != Problem::Mad) throw Error("run_mad_hst needs a mad instance");
  validate_instance(inst);
  const Tree& t = inst.the_tree();
  if (auto v = validate_hst(t, Rat(2)))
    throw Error("run_mad_hst needs a (>=2)-HST: " + v->message);

  MadRunResult out;
  out.trace.problem = Problem::Mad;
  out.trace.f = 0;
  out.trace.depth = t.problem_depth();
  out.cost = {Rat(0), Rat(0), Rat(0)};
  int service_counter = 0;

  // Sub-runs are independent per root edge; execute in edge order.
  for (int top : t.children(t.root())) {
    std::vector<Request> subreq;
    for (const auto& q : inst.requests)
      if (t.is_ancestor_node(top, q.leaf)) subreq.push_back(q);
    MadSubRunner runner{t, subtree_view(t, top), sorted_requests(subreq),
                        out.trace, &service_counter, nullptr};
    auto stats = runner.run();
    out.cost.buy += stats.concrete_buy;
    out.cost.delay += stats.delay;
    out.k += stats.k;
    out.subruns.push_back(std::move(stats));
  }
  out.trace.k = out.k;
  out.trace.reported_cost = out.cost;
  return out;
}

MadRunResult run_mad_general(const Instance& inst) {
  if (inst.problem != Problem::Mad)
    throw Error("run_mad_general needs a mad instance");
  validate_instance(inst);
  const Tree& t = inst.the_tree();
  ForestDecomposition fd = forest_decompose(t);

  MadRunResult out;
  out.trace.problem = Problem::Mad;
  out.trace.f = 0;
  out.trace.depth = t.problem_depth();
  out.cost = {Rat(0), Rat(0), Rat(0)};
  int service_counter = 0;

  for (size_t ti = 0; ti < fd.roots.size(); ++ti) {
    // Build the virtual tree: one node per edge of T^i plus a fresh root.
    const auto& edges = fd.tree_edges[ti];
    std::map<int, int> node_of;  // real edge -> virtual node
    int vn = (int)edges.size() + 1;
    std::vector<int> parent(vn, -1);
    std::vector<Rat> weight(vn, Rat(0));
    for (size_t i = 0; i < edges.size(); ++i) node_of[edges[i]] = (int)i + 1;
    for (size_t i = 0; i < edges.size(); ++i) {
      int vp = fd.virtual_parent[edges[i]];
      parent[i + 1] = vp == -1 ? 0 : node_of.at(vp);
      weight[i + 1] = t.weight(edges[i]);
    }
    Tree vtree(vn, 0, parent, weight);
    require(!validate_hst(vtree, Rat(2)).has_value(),
            "virtual tree is not a (>=2)-HST");

    std::vector<Request> subreq;
    for (const auto& q : inst.requests) {
      if (fd.tree_of[q.leaf] != (int)ti) continue;
      Request r = q;
      r.leaf = node_of.at(q.leaf);
      subreq.push_back(std::move(r));
    }

    // Run on the virtual tree with a local trace, then translate edge ids
    // back to real edges and merge.
    Trace local;
    local.problem = Problem::Mad;
    local.depth = vtree.problem_depth();
    int root_edge = vtree.children(0).front();
    std::vector<int> back(vn, -1);
    for (const auto& [real, virt] : node_of) back[virt] = real;

    auto concretize = [&](const std::vector<int>& virt_edges) {
      std::set<int> concrete;
      for (int ve : virt_edges)
        for (int e : fd.b_path[back[ve]]) concrete.insert(e);
      Rat w(0);
      for (int e : concrete) w += t.weight(e);
      return std::make_pair(std::vector<int>(concrete.begin(), concrete.end()),
                            w);
    };

    MadSubRunner runner{vtree, subtree_view(vtree, root_edge),
                        sorted_requests(subreq), local, &service_counter,
                        concretize};
    auto stats = runner.run();
    stats.root_edge = back[root_edge];

    // Translate and merge the local trace.
    for (auto x : local.explores) {
      x.elem = back[x.elem];
      x.id += (int)out.trace.explores.size();
      if (x.parent >= 0) x.parent += (int)out.trace.explores.size();
      x.enter_seq = out.trace.seq();
      out.trace.explores.push_back(x);
    }
    for (auto r : local.raises) {
      r.target = back[r.target];
      r.seq = out.trace.seq();
      out.trace.raises.push_back(r);
    }
    for (auto a : local.adds) {
      a.edge = back[a.edge];
      a.seq = out.trace.seq();
      out.trace.adds.push_back(a);
    }
    for (auto s : local.serves) {
      s.seq = out.trace.seq();
      out.trace.serves.push_back(s);
    }
    for (auto p : local.pending_entries) {
      p.seq = out.trace.seq();
      out.trace.pending_entries.push_back(p);
    }
    for (auto tx : local.transmissions) {
      std::vector<int> real_edges;
      for (int e : tx.edges) real_edges.push_back(back[e]);
      std::sort(real_edges.begin(), real_edges.end());
      tx.edges = std::move(real_edges);
      tx.seq = out.trace.seq();
      out.trace.transmissions.push_back(std::move(tx));
    }

    out.cost.buy += stats.concrete_buy;
    out.cost.delay += stats.delay;
    out.k += stats.k;
    out.subruns.push_back(std::move(stats));
  }
  out.trace.k = out.k;
  out.trace.reported_cost = out.cost;
  return out;
}

}  // namespace md
