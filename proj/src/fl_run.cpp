#include "fl_run.hpp"

#include <algorithm>

#include "surplus.hpp"

namespace md {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw Error(std::string("internal invariant failed: ") + msg);
}

class FlRun {
 public:
  FlRun(const Instance& inst, bool delay_mode)
      : inst_(inst),
        tree_(inst.the_tree()),
        f_(inst.opening_cost()),
        delay_mode_(delay_mode) {
    validate_instance(inst);
    if (auto v = validate_hst(tree_, Rat(2)))
      throw Error("fl run needs a (>=2)-HST: " + v->message);
    tr_.problem = delay_mode ? Problem::FlDelay : Problem::FlDeadline;
    tr_.f = f_;
    tr_.depth = tree_.problem_depth();
    tr_.cumulative_root = 0;
    int n = tree_.size();
    counter_.assign(n, Rat(0));
    phase_.assign(n, 0);
    for (const auto& q : inst.requests) requests_.push_back(&q);
    std::sort(requests_.begin(), requests_.end(),
              [](const Request* a, const Request* b) {
                if (a->release != b->release) return a->release < b->release;
                return a->id < b->id;
              });
    pending_.assign(requests_.size(), false);
    served_.assign(requests_.size(), false);
    clock_ = requests_.empty() ? Rat(0) : requests_.front()->release;
  }

  RunResult run() {
    flush_releases(clock_);
    while (true) {
      MaybeTime next_release;
      if (next_release_ < requests_.size())
        next_release = requests_[next_release_]->release;
      MaybeTime trigger = next_trigger();
      if (!trigger && !next_release) break;
      if (next_release && (!trigger || *next_release <= *trigger)) {
        clock_ = rat_max(clock_, *next_release);
        flush_releases(clock_);
        continue;
      }
      // Between services every pending set stays subcritical; a trigger that
      // fires after a genuine wait therefore sits exactly on the threshold.
      if (*trigger > clock_) {
        if (delay_mode_)
          require(fl_critical_surplus(tree_, tree_.root(), f_, pending_list(),
                                      *trigger) == 0,
                  "criticality crossing not tight");
        clock_ = *trigger;
      }
      service();
      flush_releases(clock_);
    }
    for (size_t i = 0; i < requests_.size(); ++i)
      require(served_[i], "request left unserved");
    for (int u = 0; u < tree_.size(); ++u) {
      Rat c = cumulative_.count(u) ? cumulative_[u] : Rat(0);
      tr_.cumulative[u] = c;
    }
    tr_.reported_cost = cost_;
    tr_.k = k_;
    RunResult out{std::move(tr_), cost_, k_};
    return out;
  }

 private:
  const Instance& inst_;
  const Tree& tree_;
  Rat f_;
  bool delay_mode_;
  Trace tr_;
  CostBreakdown cost_{Rat(0), Rat(0), Rat(0)};
  std::vector<const Request*> requests_;  // sorted by (release, id)
  std::vector<char> pending_, served_;
  size_t next_release_ = 0;
  std::vector<Rat> counter_;
  std::vector<long> phase_;
  std::map<int, Rat> cumulative_;
  Rat clock_;
  int k_ = 0;
  int current_service_ = -1;
  long iteration_guard_ = 0;

  void flush_releases(const Rat& t) {
    while (next_release_ < requests_.size() &&
           requests_[next_release_]->release <= t) {
      pending_[next_release_] = true;
      tr_.pending_entries.push_back({requests_[next_release_]->id, t, tr_.seq()});
      ++next_release_;
    }
  }

  RequestList pending_list() const {
    RequestList out;
    for (size_t i = 0; i < requests_.size(); ++i)
      if (pending_[i]) out.push_back(requests_[i]);
    return out;
  }

  size_t index_of(const Request* q) const {
    for (size_t i = 0; i < requests_.size(); ++i)
      if (requests_[i] == q) return i;
    throw Error("unknown request");
  }

  MaybeTime next_trigger() {
    if (delay_mode_)
      return earliest_fl_critical(tree_, tree_.root(), f_, pending_list(), clock_);
    // Deadline mode: the earliest deadline of a pending request.
    MaybeTime best;
    for (size_t i = 0; i < requests_.size(); ++i)
      if (pending_[i] && (!best || requests_[i]->deadline() < *best))
        best = requests_[i]->deadline();
    return best;
  }

  void service() {
    current_service_ = k_++;
    iteration_guard_ = 0;
    if (delay_mode_)
      explore_delay(tree_.root(), -1);
    else
      explore_deadline(tree_.root(), -1);
    current_service_ = -1;
  }

  // --- shared pieces -------------------------------------------------------

  int begin_explore(int u, int parent_explore) {
    Trace::Explore x;
    x.id = (int)tr_.explores.size();
    x.elem = u;
    x.t_enter = clock_;
    x.parent = parent_explore;
    x.service = current_service_;
    x.enter_seq = tr_.seq();
    tr_.explores.push_back(x);
    if (tree_.is_root(u)) tr_.cumulative_root += f_;
    return x.id;
  }

  void open(int u, int xid) {
    tr_.opens.push_back({u, clock_, xid, tr_.seq()});
    cost_.buy += f_;
    if (tree_.is_leaf(u)) {
      // Connect every pending request sitting on u for free.
      for (size_t i = 0; i < requests_.size(); ++i)
        if (pending_[i] && requests_[i]->leaf == u) connect(i, u, xid);
    }
  }

  Rat invest(int xid, int v, const Rat& x, Rat& budget) {
    Rat y = rat_min(x, rat_min(budget, f_ - counter_[v]));
    if (y < 0) y = 0;
    if (y > 0) {
      counter_[v] += y;
      cumulative_[v] += y;
      budget -= y;
      tr_.raises.push_back({xid, v, y, phase_[v], clock_, tr_.seq()});
    }
    return y;
  }

  void connect(size_t qi, int u, int xid) {
    const Request* q = requests_[qi];
    Rat c = tree_.dist_to_ancestor(q->leaf, u);
    pending_[qi] = false;
    served_[qi] = true;
    tr_.connects.push_back({q->id, u, c, clock_, xid, tr_.seq()});
    Rat d = delay_mode_ ? delay_at(*q, clock_) : Rat(0);
    tr_.serves.push_back({q->id, clock_, d, current_service_, tr_.seq()});
    cost_.connect += c;
    cost_.delay += d;
  }

  int child_toward(int u, int leaf) const {
    for (int c : tree_.children(u))
      if (tree_.is_ancestor_node(c, leaf)) return c;
    throw Error("leaf not under node");
  }

  bool has_pending_under(int u) const {
    for (size_t i = 0; i < requests_.size(); ++i)
      if (pending_[i] && tree_.is_ancestor_node(u, requests_[i]->leaf)) return true;
    return false;
  }

  void guard() {
    if (++iteration_guard_ > 64L * (long)(requests_.size() + 4) *
                                 (long)(tree_.size() + 4))
      throw Error("explore loop exceeded its iteration budget");
  }

  // --- deadline exploration ------------------------------------------------

  const Request* earliest_deadline_under(int u) const {
    const Request* best = nullptr;
    for (size_t i = 0; i < requests_.size(); ++i) {
      if (!pending_[i]) continue;
      const Request* q = requests_[i];
      if (!tree_.is_ancestor_node(u, q->leaf)) continue;
      if (!best || q->deadline() < best->deadline() ||
          (q->deadline() == best->deadline() && q->id < best->id))
        best = q;
    }
    return best;
  }

  void explore_deadline(int u, int parent_explore) {
    int xid = begin_explore(u, parent_explore);
    open(u, xid);
    Rat budget = f_;
    while (budget != 0) {
      const Request* q = earliest_deadline_under(u);
      if (!q) break;
      guard();
      int v = child_toward(u, q->leaf);
      Rat x = tree_.dist_to_ancestor(q->leaf, u);
      invest(xid, v, x, budget);
      if (counter_[v] == f_) {
        counter_[v] = 0;
        ++phase_[v];
        explore_deadline(v, xid);
      }
      size_t qi = index_of(q);
      if (pending_[qi]) connect(qi, u, xid);
      require(served_[qi], "considered request not served");
    }
    if (has_pending_under(u))
      require(budget == 0, "pending remain but budget not fully spent");
    auto& rec = tr_.explores[xid];
    rec.t_return = clock_;
    rec.return_seq = tr_.seq();
    const Request* next = earliest_deadline_under(u);
    if (next) rec.lambda = next->deadline();
  }

  // --- delay exploration ----------------------------------------------------

  // Earliest event-1 time: a single pending request under u whose delay
  // reaches its connection cost to u.
  std::pair<MaybeTime, const Request*> detector_single(int u) const {
    MaybeTime best;
    const Request* arg = nullptr;
    for (size_t i = 0; i < requests_.size(); ++i) {
      if (!pending_[i]) continue;
      const Request* q = requests_[i];
      if (!tree_.is_ancestor_node(u, q->leaf)) continue;
      Rat t = delay_crossing(*q, tree_.dist_to_ancestor(q->leaf, u), clock_);
      if (!best || t < *best || (t == *best && q->id < arg->id)) {
        best = t;
        arg = q;
      }
    }
    return {best, arg};
  }

  // Earliest event-2 time: a coalition under some child v of u whose delay
  // reaches psi_v of the coalition.
  std::pair<MaybeTime, int> detector_coalition(int u) const {
    MaybeTime best;
    int arg = -1;
    RequestList pl = pending_list();
    for (int v : tree_.children(u)) {
      auto t = earliest_fl_critical(tree_, v, f_, pl, clock_);
      if (t && (!best || *t < *best)) {
        best = t;
        arg = v;
      }
    }
    return {best, arg};
  }

  void explore_delay(int u, int parent_explore) {
    int xid = begin_explore(u, parent_explore);
    Rat entered_at = clock_;
    open(u, xid);
    Rat budget = f_;
    while (budget != 0 && has_pending_under(u)) {
      guard();
      // The two detectors look ahead for the earliest of the two events; the
      // earlier one decides the investment. The service itself is atomic at
      // its trigger instant, so the clock stays put and served requests pay
      // their delay as of that instant.
      auto [t1, q1] = detector_single(u);
      auto [t2, v2] = detector_coalition(u);
      require(t1.has_value(), "event-1 detector found nothing while pending");
      require(t2.has_value(), "event-2 detector found nothing while pending");
      require(rat_min(*t1, *t2) >= clock_, "detector time regressed");
      if (*t1 <= *t2) {
        int v = child_toward(u, q1->leaf);
        Rat x = tree_.dist_to_ancestor(q1->leaf, u);
        Rat y = invest(xid, v, x, budget);
        if (counter_[v] == f_) {
          counter_[v] = 0;
          ++phase_[v];
          explore_delay(v, xid);
        }
        size_t qi = index_of(q1);
        if (pending_[qi]) {
          invest(xid, v, x - y, budget);
          connect(qi, u, xid);
        }
      } else {
        int v = v2;
        invest(xid, v, f_, budget);
        if (counter_[v] == f_) {
          counter_[v] = 0;
          ++phase_[v];
          explore_delay(v, xid);
        }
      }
    }
    if (has_pending_under(u))
      require(budget == 0, "pending remain but budget not fully spent");
    auto& rec = tr_.explores[xid];
    rec.t_return = clock_;
    rec.return_seq = tr_.seq();
    rec.lambda = delay_lambda(u, entered_at);
  }

  // The two-condition lambda of the delay analysis, evaluated on the pending
  // set immediately after the return of an exploration entered at t0.
  MaybeTime delay_lambda(int u, const Rat& t0) {
    MaybeTime best;
    RequestList pl = pending_list();
    for (const Request* q : pl) {
      if (!tree_.is_ancestor_node(u, q->leaf)) continue;
      Rat t = delay_crossing(*q, tree_.dist_to_ancestor(q->leaf, u), t0);
      if (!best || t < *best) best = t;
    }
    for (int v : tree_.children(u)) {
      auto t = earliest_fl_critical(tree_, v, f_, pl, t0);
      if (t && (!best || *t < *best)) best = t;
    }
    return best;
  }
};

}  // namespace

RunResult run_fl_deadline(const Instance& inst) {
  if (inst.problem != Problem::FlDeadline)
    throw Error("run_fl_deadline needs an fl-deadline instance");
  return FlRun(inst, false).run();
}

RunResult run_fl_delay(const Instance& inst) {
  if (inst.problem != Problem::FlDelay)
    throw Error("run_fl_delay needs an fl-delay instance");
  return FlRun(inst, true).run();
}

LeafProjection project_to_leaves(const Instance& inst, const Tree& tree,
                                 const Trace& tr) {
  LeafProjection out;
  out.connect_cost = 0;
  std::map<int, const Request*> req;
  for (const auto& q : inst.requests) req[q.id] = &q;
  for (const auto& o : tr.opens) {
    // Requests connected to this opening (same explore).
    std::vector<const Trace::Connect*> mine;
    for (const auto& c : tr.connects)
      if (c.explore == o.explore && c.node == o.node) mine.push_back(&c);
    if (mine.empty()) {
      // Nobody connected here; park the opening on the nearest leaf below.
      int leaf = o.node;
      while (!tree.is_leaf(leaf)) leaf = tree.children(leaf).front();
      out.openings.push_back({o.t, leaf});
      continue;
    }
    int best_leaf = -1;
    Rat best_d;
    for (const auto* c : mine) {
      Rat d = tree.dist(o.node, req.at(c->request)->leaf);
      if (best_leaf == -1 || d < best_d ||
          (d == best_d && req.at(c->request)->leaf < best_leaf)) {
        best_leaf = req.at(c->request)->leaf;
        best_d = d;
      }
    }
    out.openings.push_back({o.t, best_leaf});
    for (const auto* c : mine) {
      out.connection_target[c->request] = best_leaf;
      out.connect_cost += tree.dist(req.at(c->request)->leaf, best_leaf);
    }
  }
  return out;
}

}  // namespace md
