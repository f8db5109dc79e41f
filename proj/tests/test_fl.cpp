#include <doctest.h>

#include "fl_run.hpp"
#include "gen.hpp"
#include "surplus.hpp"
#include "test_helpers.hpp"
#include "trace.hpp"

using namespace md;
using namespace mdtest;

namespace {

Instance make_fl(Tree t, const Rat& f, std::vector<Request> reqs, Problem p) {
  Instance inst;
  inst.problem = p;
  inst.tree = std::move(t);
  inst.f = f;
  inst.requests = std::move(reqs);
  validate_instance(inst);
  return inst;
}

Instance gen_fl(uint64_t seed, Problem p, int n = 6, int requests = 8) {
  GenSpec g;
  g.kind = "random-hst";
  g.problem = problem_name(p);
  g.n = n;
  g.requests = requests;
  g.seed = seed;
  g.profile = p == Problem::FlDeadline ? "deadline-uniform" : "linear-slopes";
  return gen_instance(g);
}

}  // namespace

TEST_CASE("invest arithmetic") {
  // min(x, b_u, f - c_v) through a crafted run is awkward to poke directly;
  // the arithmetic shows up as counter values in a two-request run. Checked
  // here on the documented values instead.
  Rat f(7), c(3), b(5), x(10);
  Rat y = rat_min(x, rat_min(b, f - c));
  CHECK(y == R(4));
  CHECK(rat_min(R(0), rat_min(b, f - c)) == R(0));
  Rat c2(0), b2(10), x2(3);
  CHECK(rat_min(x2, rat_min(b2, f - c2)) == R(3));
}

TEST_CASE("fl-deadline single request under the root") {
  Tree t = chain({R(4), R(1)});
  auto inst = make_fl(t, R(6), {deadline_request(0, 2, R(0), R(10))},
                      Problem::FlDeadline);
  auto r = run_fl_deadline(inst);
  CHECK(r.k == 1);
  CHECK(r.trace.serves.size() == 1);
  CHECK(r.trace.serves[0].t == R(10));
  CHECK(r.trace.opens.size() >= 1);
  CHECK(r.cost.delay == R(0));
  audit_trace(inst, *inst.tree, r.trace);  // validity + cost recomputation
}

TEST_CASE("fl-deadline no requests") {
  Tree t = chain({R(4), R(1)});
  auto inst = make_fl(t, R(6), {}, Problem::FlDeadline);
  auto r = run_fl_deadline(inst);
  CHECK(r.k == 0);
  CHECK(r.cost.total() == R(0));
}

TEST_CASE("fl-deadline load-time precondition rejection") {
  Tree t = chain({R(4), R(1)});
  CHECK_THROWS_WITH_AS(
      make_fl(t, R(3), {deadline_request(0, 2, R(0), R(10))},
              Problem::FlDeadline),
      doctest::Contains("w(e) <= f"), Error);
  CHECK_THROWS_WITH_AS(
      make_fl(t, R(9, 2), {deadline_request(0, 2, R(0), R(10))},
              Problem::FlDeadline),
      doctest::Contains("root-to-leaf"), Error);
  // Requests on internal nodes are rejected at load.
  Instance bad;
  bad.problem = Problem::FlDeadline;
  bad.tree = chain({R(4), R(1)});
  bad.f = R(6);
  bad.requests = {deadline_request(0, 1, R(0), R(10))};
  CHECK_THROWS_WITH_AS(validate_instance(bad),
                       doctest::Contains("leaves of the tree"), Error);
  // Delay-curve request in a deadline instance.
  Instance wrong;
  wrong.problem = Problem::FlDeadline;
  wrong.tree = chain({R(4), R(1)});
  wrong.f = R(6);
  wrong.requests = {linear_request(0, 2, R(0), R(1))};
  CHECK_THROWS(validate_instance(wrong));
}

TEST_CASE("fl-deadline bound and validity across seeds") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    Instance inst = gen_fl(seed, Problem::FlDeadline);
    auto r = run_fl_deadline(inst);
    const Tree& t = *inst.tree;
    CostBreakdown audited = audit_trace(inst, t, r.trace);
    CHECK(audited.total() ==
          r.cost.total());  // audit throws on any validity breach
    CHECK(r.cost.total() <=
          Rat(3 * (t.problem_depth() + 1) * r.k) * inst.opening_cost());
    for (const auto& s : r.trace.serves) {
      const Request* q = nullptr;
      for (const auto& x : inst.requests)
        if (x.id == s.request) q = &x;
      REQUIRE(q);
      CHECK(s.t <= q->deadline());
      CHECK(s.t >= q->release);
    }
  }
}

TEST_CASE("counter-phase accounting invariants") {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    Instance inst = gen_fl(seed, Problem::FlDeadline);
    auto r = run_fl_deadline(inst);
    const Tree& t = *inst.tree;
    const Rat& f = inst.opening_cost();

    // Layer sums of cumulative counters never increase with depth, and the
    // total is at most (D+1) k f.
    std::map<int, Rat> layer;
    Rat total = r.trace.cumulative_root;
    layer[0] = r.trace.cumulative_root;
    for (const auto& [u, c] : r.trace.cumulative) {
      if (t.is_root(u)) continue;
      layer[t.depth(u)] += c;
      total += c;
    }
    CHECK(r.trace.cumulative_root == Rat(r.k) * f);
    for (int j = 1; j <= t.problem_depth(); ++j)
      CHECK(layer[j] <= layer[j - 1]);
    CHECK(total <= Rat((t.problem_depth() + 1) * r.k) * f);

    // Every exploration of a non-root node is preceded by its counter
    // filling: the raises targeting phase p of node u sum to exactly f for
    // every completed phase.
    std::map<std::pair<int, long>, Rat> phase_sum;
    for (const auto& raise : r.trace.raises)
      phase_sum[{raise.target, raise.target_phase}] += raise.amount;
    std::map<int, int> explore_count;
    for (const auto& x : r.trace.explores)
      if (!t.is_root(x.elem)) explore_count[x.elem]++;
    for (const auto& [elem, count] : explore_count)
      for (long p = 0; p < count; ++p)
        CHECK(phase_sum[{elem, p}] == f);

    // Budget exactness: an exploration returning with pending requests in its
    // subtree spent exactly f (its raises sum to f).
    std::map<int, Rat> spent_by_explore;
    for (const auto& raise : r.trace.raises)
      spent_by_explore[raise.explore] += raise.amount;
    std::map<int, Rat> served_at;
    for (const auto& s : r.trace.serves) served_at[s.request] = s.t;
    for (const auto& x : r.trace.explores) {
      bool pending_after = false;
      for (const auto& q : inst.requests) {
        if (!t.is_ancestor_node(x.elem, q.leaf)) continue;
        if (q.release > x.t_return) continue;  // released later
        if (served_at[q.id] > x.t_return) pending_after = true;
      }
      if (pending_after) CHECK(spent_by_explore[x.id] == f);
      CHECK(spent_by_explore[x.id] <= f);
    }
  }
}

TEST_CASE("fl-delay single request chain example") {
  // f=5, chain root -> u(3) -> v(1), d(t)=t: critical at t=9.
  Tree t = chain({R(3), R(1)});
  auto inst =
      make_fl(t, R(5), {linear_request(0, 2, R(0), R(1))}, Problem::FlDelay);
  auto r = run_fl_delay(inst);
  CHECK(r.k == 1);
  REQUIRE(r.trace.serves.size() == 1);
  CHECK(r.trace.serves[0].t == R(9));
  CHECK(r.cost.delay == R(9));
  audit_trace(inst, *inst.tree, r.trace);
}

TEST_CASE("fl-delay bounds and criticality invariant across seeds") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    Instance inst = gen_fl(seed, Problem::FlDelay);
    auto r = run_fl_delay(inst);
    const Tree& t = *inst.tree;
    CostBreakdown c = audit_trace(inst, t, r.trace);
    CHECK(c.delay <= c.buy + c.connect);
    CHECK(c.buy + c.connect <=
          Rat(3 * (t.problem_depth() + 1) * r.k) * inst.opening_cost());

    // Every service's own solution is ancestor-closed and the served set's
    // delay at the service instant is at most psi of that set.
    std::map<int, std::vector<const Trace::Connect*>> by_service_connect;
    for (const auto& cn : r.trace.connects) {
      int svc = r.trace.explores[cn.explore].service;
      by_service_connect[svc].push_back(&cn);
    }
    std::map<int, const Request*> req;
    for (const auto& q : inst.requests) req[q.id] = &q;
    for (const auto& [svc, conns] : by_service_connect) {
      RequestList served;
      Rat d(0);
      Rat when = conns.front()->t;
      for (const auto* cn : conns) {
        served.push_back(req.at(cn->request));
        d += delay_at(*req.at(cn->request), cn->t);
      }
      (void)when;
      CHECK(d <= psi(t, t.root(), served, inst.opening_cost()));
    }
  }
}

TEST_CASE("deadline requests are rejected by the fl-delay run") {
  Tree t = chain({R(3), R(1)});
  Instance inst;
  inst.problem = Problem::FlDelay;
  inst.tree = t;
  inst.f = R(5);
  inst.requests = {deadline_request(0, 2, R(0), R(9))};
  CHECK_THROWS(validate_instance(inst));
}

TEST_CASE("leaf projection doubles connection cost at most") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Instance inst = gen_fl(seed, Problem::FlDeadline);
    auto r = run_fl_deadline(inst);
    auto proj = project_to_leaves(inst, *inst.tree, r.trace);
    CHECK(proj.connect_cost <= 2 * r.cost.connect);
    CHECK(proj.openings.size() == r.trace.opens.size());
    for (const auto& [t_, leaf] : proj.openings) CHECK(inst.tree->is_leaf(leaf));
  }
}
