#include "osd_run.hpp"

#include <algorithm>

#include "mad_run.hpp"
#include "surplus.hpp"

namespace md {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw Error(std::string("internal invariant failed: ") + msg);
}

// Server internal to T_e: at a node of T_e other than e's top node.
bool internal_to(const Tree& t, int e, int node) {
  return t.is_ancestor_node(e, node);
}

}  // namespace

std::vector<int> major_edges(const Tree& t, int server) {
  std::vector<int> out;
  for (int e = 0; e < t.size(); ++e) {
    if (t.is_root(e)) continue;
    if (internal_to(t, e, server)) {
      out.push_back(e);  // the path to e runs inside T_e, all lighter edges
      continue;
    }
    int top = t.parent(e);
    if (!t.is_ancestor_node(top, server)) continue;  // path would cross p(e)
    bool ok = true;
    for (int x = server; x != top; x = t.parent(x))
      if (t.weight(x) > t.weight(e)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    if (t.weight(a) != t.weight(b)) return t.weight(a) < t.weight(b);
    return a < b;
  });
  return out;
}

std::optional<OsdCritical> detect_osd_critical(const Tree& t, int server,
                                               const RequestList& pending,
                                               const Rat& t0) {
  std::optional<OsdCritical> best;
  for (int e : major_edges(t, server)) {
    bool internal = internal_to(t, e, server);
    MaybeTime c;
    if (internal) {
      c = earliest_promoted_saturation(t, promoted_view(t, e), pending, t0);
    } else {
      c = earliest_saturation(t, e, pending, t0);
    }
    if (!c) continue;
    if (!best || *c < best->t ||
        (*c == best->t && (t.weight(e) < t.weight(best->edge) ||
                           (t.weight(e) == t.weight(best->edge) && e < best->edge))))
      best = OsdCritical{*c, e, internal};
  }
  return best;
}

namespace {

class OsdRun {
 public:
  explicit OsdRun(const Instance& inst)
      : inst_(inst), tree_(inst.the_tree()) {
    validate_instance(inst);
    if (auto v = validate_hst(tree_, Rat(2)))
      throw Error("run_osd needs a (>=2)-HST: " + v->message);
    for (int u = 0; u < tree_.size(); ++u)
      if (!tree_.is_root(u) && !is_pow2(tree_.weight(u)))
        throw Error("run_osd needs power-of-2 edge weights (round at load)");
    tr_.problem = Problem::Osd;
    tr_.f = 0;
    tr_.depth = tree_.problem_depth();
    server_ = *inst.server_start;
    counters_.assign(tree_.size(), Rat(0));
    phases_.assign(tree_.size(), 0);
    for (const auto& q : inst.requests) requests_.push_back(&q);
    std::sort(requests_.begin(), requests_.end(),
              [](const Request* a, const Request* b) {
                if (a->release != b->release) return a->release < b->release;
                return a->id < b->id;
              });
    pending_.assign(requests_.size(), false);
    clock_ = requests_.empty() ? Rat(0) : requests_.front()->release;
  }

  OsdRunResult run() {
    flush_releases(clock_);
    Rat last_service_end;
    bool have_last = false;
    int phase = -1;
    while (true) {
      MaybeTime next_rel;
      if (next_release_ < requests_.size())
        next_rel = requests_[next_release_]->release;
      auto crit = detect_osd_critical(tree_, server_, pending_list(), clock_);
      if (!crit && !next_rel) break;
      if (next_rel && (!crit || *next_rel <= crit->t)) {
        clock_ = rat_max(clock_, *next_rel);
        flush_releases(clock_);
        continue;
      }
      bool waited = crit->t > clock_;
      clock_ = crit->t;
      if (!(have_last && !waited && clock_ == last_service_end)) ++phase;
      service(*crit, phase);
      last_service_end = clock_;
      have_last = true;
      flush_releases(clock_);
    }
    for (size_t i = 0; i < requests_.size(); ++i)
      require(!pending_[i], "request left unserved");
    tr_.k = k_;
    tr_.reported_cost = cost_;
    return OsdRunResult{std::move(tr_), cost_, k_};
  }

 private:
  const Instance& inst_;
  const Tree& tree_;
  Trace tr_;
  CostBreakdown cost_{Rat(0), Rat(0), Rat(0)};
  int server_ = -1;
  std::vector<const Request*> requests_;
  std::vector<char> pending_;
  size_t next_release_ = 0;
  std::vector<Rat> counters_;
  std::vector<long> phases_;
  Rat clock_;
  int k_ = 0;

  RequestList pending_list() const {
    RequestList out;
    for (size_t i = 0; i < requests_.size(); ++i)
      if (pending_[i]) out.push_back(requests_[i]);
    return out;
  }

  void flush_releases(const Rat& t) {
    while (next_release_ < requests_.size() &&
           requests_[next_release_]->release <= t) {
      pending_[next_release_] = true;
      tr_.pending_entries.push_back({requests_[next_release_]->id, t, tr_.seq()});
      serve_colocated(next_release_);
      ++next_release_;
    }
  }

  // A pending request at the server's own node cannot stay pending.
  void serve_colocated(size_t qi) {
    if (!pending_[qi]) return;
    if (requests_[qi]->leaf != server_) return;
    pending_[qi] = false;
    Rat d = delay_at(*requests_[qi], clock_);
    tr_.serves.push_back({requests_[qi]->id, clock_, d, -1, tr_.seq()});
    cost_.delay += d;
  }

  void serve_all_colocated() {
    for (size_t i = 0; i < requests_.size(); ++i)
      if (pending_[i]) serve_colocated(i);
  }

  void move_to(int node, int kind, int service) {
    if (node == server_) return;
    Rat c = tree_.dist(server_, node);
    tr_.moves.push_back({server_, node, c, clock_, kind, service, tr_.seq()});
    cost_.buy += c;
    server_ = node;
    serve_all_colocated();
  }

  void service(const OsdCritical& crit, int phase) {
    int e = crit.edge;
    int service = k_++;
    Trace::OsdService rec;
    rec.index = service;
    rec.t_trigger = clock_;
    rec.major_edge = e;
    rec.relative_side = crit.relative;
    rec.server_in_te_before = internal_to(tree_, e, server_);
    rec.phase = phase;
    require(rec.server_in_te_before == crit.relative,
            "critical tree must lie on the other side of the major edge");

    // e = (u1, u2) with the server on u1's side.
    int u1 = crit.relative ? e : tree_.parent(e);
    int u2 = crit.relative ? tree_.parent(e) : e;
    Rat approach = tree_.dist(server_, u1);
    require(approach <= 2 * tree_.weight(e), "approach cost exceeds 2w(e)");
    move_to(u1, 0, service);
    rec.approach_cost = approach;

    // Explore Y_e with the multilevel-aggregation explorer on the shared
    // counters; the pending view is restricted to the requests internal to
    // Y_e at the service start.
    MadView view = crit.relative ? relative_view(tree_, e) : subtree_view(tree_, e);
    std::vector<const Request*> internal_reqs;
    std::vector<size_t> internal_idx;
    for (size_t i = 0; i < requests_.size(); ++i) {
      bool in_view = false;
      if (crit.relative) {
        for (int s : view.root_children)
          if (tree_.is_ancestor_node(s, requests_[i]->leaf)) in_view = true;
      } else {
        in_view = tree_.is_ancestor_node(e, requests_[i]->leaf);
      }
      if (in_view) {
        internal_reqs.push_back(requests_[i]);
        internal_idx.push_back(i);
      }
    }
    std::vector<char> sub_pending(internal_reqs.size(), false);
    for (size_t i = 0; i < internal_idx.size(); ++i)
      sub_pending[i] = pending_[internal_idx[i]];

    MadExplorerEnv env;
    env.tree = &tree_;
    env.counters = &counters_;
    env.phases = &phases_;
    env.requests = &internal_reqs;
    env.pending = &sub_pending;
    env.trace = &tr_;
    env.clock = &clock_;
    env.service = service;
    size_t serves_before = tr_.serves.size();
    auto edges = mad_explore(view, env);
    for (size_t i = 0; i < internal_idx.size(); ++i)
      if (pending_[internal_idx[i]] && !sub_pending[i])
        pending_[internal_idx[i]] = false;
    for (size_t i = serves_before; i < tr_.serves.size(); ++i)
      if (tr_.serves[i].service == service) cost_.delay += tr_.serves[i].delay_paid;
    rec.edges = edges;
    rec.explored_weight = 0;
    for (int x : edges) rec.explored_weight += tree_.weight(x);

    // DFS traversal of the explored tree, finishing at u1, then cross e.
    Rat traverse(0);
    euler_tour(view, edges, view.root_edge, &traverse, service);
    require(server_ == u1, "traversal must finish where it started");
    require(traverse == 2 * rec.explored_weight,
            "traversal cost must be exactly twice the explored weight");
    rec.traverse_cost = traverse;
    move_to(u2, 2, service);
    rec.cross_cost = tree_.weight(e);
    rec.server_in_te_after = internal_to(tree_, e, server_);
    require(rec.server_in_te_after != rec.server_in_te_before,
            "server must end on the opposite side of the major edge");
    rec.t_end = clock_;
    tr_.osd_services.push_back(std::move(rec));
  }

  // Walks every explored edge down and back up, child edges in ascending
  // order. View-aware: the promoted root edge is walked from its bottom node.
  void euler_tour(const MadView& view, const std::vector<int>& edges, int e,
                  Rat* total, int service) {
    bool root = e == view.root_edge;
    int top = root && view.promoted ? e : tree_.parent(e);
    int bottom = root && view.promoted ? tree_.parent(e) : e;
    require(server_ == top, "euler tour entered from the wrong node");
    *total += tree_.weight(e);
    move_to(bottom, 1, service);
    for (int c : view.children_of(e))
      if (std::binary_search(edges.begin(), edges.end(), c))
        euler_tour(view, edges, c, total, service);
    *total += tree_.weight(e);
    move_to(top, 1, service);
  }
};

}  // namespace

OsdRunResult run_osd(const Instance& inst) {
  if (inst.problem != Problem::Osd) throw Error("run_osd needs an osd instance");
  return OsdRun(inst).run();
}

OsdScore score_against(const Instance& inst, const Tree& tree, const Trace& tr,
                       const OfflineSolution& offline) {
  if (offline.problem != Problem::Osd)
    throw Error("score_against needs an osd offline solution");
  CostBreakdown feas = verify_solution(inst, tree, offline);  // rejects infeasible
  OsdScore sc;
  sc.feas_buy = feas.buy;
  sc.feas_delay = feas.delay;
  sc.lhs = 0;
  for (const auto& s : tr.osd_services) {
    int opt_pos = osd_position_before(offline, s.t_trigger);
    bool opt_in_te = tree.is_ancestor_node(s.major_edge, opt_pos);
    int ind = opt_in_te == s.server_in_te_before ? 1 : 0;
    sc.indicators.push_back(ind);
    if (ind) sc.lhs += tree.weight(s.major_edge);
  }
  sc.rhs = 3 * feas.buy + Rat(3 * tr.depth) * feas.delay;
  sc.ok = sc.lhs <= sc.rhs;
  return sc;
}

std::vector<LedgerSegment> leaf_movement_ledger(const Tree& t, const Trace& tr) {
  std::vector<LedgerSegment> out;
  LedgerSegment open;
  bool in_flight = false;
  for (const auto& m : tr.moves) {
    if (!in_flight) {
      open = {m.from, m.to, m.cost, m.t};
      in_flight = true;
    } else {
      open.to = m.to;
      open.cost += m.cost;
      open.t = m.t;
    }
    if (t.is_leaf(open.to)) {
      out.push_back(open);
      in_flight = false;
    }
  }
  if (in_flight) out.push_back(open);  // run may end on an internal node
  return out;
}

}  // namespace md
