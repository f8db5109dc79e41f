#include "surplus.hpp"

#include <algorithm>
#include <map>

namespace md {

namespace {

// pending requests grouped by leaf, restricted to the subtree under `top`
// (node-subtree semantics; for an edge this is the subtree under its bottom
// node, which equals T_e minus the edge itself).
std::map<int, RequestList> group_by_leaf(const Tree& t, int top,
                                         const RequestList& pending) {
  std::map<int, RequestList> by_leaf;
  for (const Request* q : pending)
    if (t.is_ancestor_node(top, q->leaf)) by_leaf[q->leaf].push_back(q);
  return by_leaf;
}

Rat leaf_delay_sum(const RequestList& qs, const Rat& at) {
  Rat s(0);
  for (const Request* q : qs) s += delay_at(*q, at);
  return s;
}

PLFn leaf_delay_fn(const RequestList& qs, const Rat& t0) {
  PLFn f = PLFn::constant(t0, Rat(0));
  for (const Request* q : qs) f = f + q->curve().tail(t0);
  return f;
}

// g-value DP below the bottom node of edge `e`, values only.
Rat g_value(const Tree& t, int e, const std::map<int, RequestList>& by_leaf,
            const Rat& at) {
  if (t.is_leaf(e)) {
    auto it = by_leaf.find(e);
    return it == by_leaf.end() ? Rat(0) : leaf_delay_sum(it->second, at);
  }
  Rat s(0);
  for (int c : t.children(e)) {
    Rat gc = g_value(t, c, by_leaf, at) - t.weight(c);
    if (gc > 0) s += gc;
  }
  return s;
}

PLFn g_fn(const Tree& t, int e, const std::map<int, RequestList>& by_leaf,
          const Rat& t0) {
  if (t.is_leaf(e)) {
    auto it = by_leaf.find(e);
    return it == by_leaf.end() ? PLFn::constant(t0, Rat(0))
                               : leaf_delay_fn(it->second, t0);
  }
  PLFn s = PLFn::constant(t0, Rat(0));
  for (int c : t.children(e)) s = s + (g_fn(t, c, by_leaf, t0) - t.weight(c)).max0();
  return s;
}

void g_witness(const Tree& t, int e, const std::map<int, RequestList>& by_leaf,
               const Rat& at, RequestList& out) {
  if (t.is_leaf(e)) {
    auto it = by_leaf.find(e);
    if (it != by_leaf.end())
      for (const Request* q : it->second)
        if (delay_at(*q, at) > 0) out.push_back(q);
    return;
  }
  for (int c : t.children(e))
    if (g_value(t, c, by_leaf, at) - t.weight(c) > 0) g_witness(t, c, by_leaf, at, out);
}

}  // namespace

Rat saturation_surplus(const Tree& t, int edge, const RequestList& pending,
                       const Rat& at) {
  if (t.is_root(edge)) throw Error("saturation queries need an edge, not the root");
  return g_value(t, edge, group_by_leaf(t, edge, pending), at);
}

PLFn saturation_fn(const Tree& t, int edge, const RequestList& pending,
                   const Rat& t0) {
  if (t.is_root(edge)) throw Error("saturation queries need an edge, not the root");
  return g_fn(t, edge, group_by_leaf(t, edge, pending), t0);
}

MaybeTime earliest_saturation(const Tree& t, int edge, const RequestList& pending,
                              const Rat& t0) {
  return saturation_fn(t, edge, pending, t0).crossing(t.weight(edge));
}

RequestList saturation_witness(const Tree& t, int edge, const RequestList& pending,
                               const Rat& at) {
  RequestList out;
  g_witness(t, edge, group_by_leaf(t, edge, pending), at, out);
  return out;
}

Rat fl_connection_surplus(const Tree& t, int u, const RequestList& pending,
                          const Rat& at) {
  Rat s(0);
  for (const Request* q : pending) {
    if (!t.is_ancestor_node(u, q->leaf)) continue;
    Rat v = delay_at(*q, at) - t.dist_to_ancestor(q->leaf, u);
    if (v > 0) s += v;
  }
  return s;
}

namespace {

// S-value DP at node u, with connection hinges measured against `anchor`
// when evaluating the P alternative in the parent; at the node itself S uses
// the decomposition with the node as anchor for its own children.
Rat s_value(const Tree& t, int u, const Rat& f,
            const std::map<int, RequestList>& by_leaf, const Rat& at) {
  if (t.is_leaf(u)) {
    auto it = by_leaf.find(u);
    Rat d = it == by_leaf.end() ? Rat(0) : leaf_delay_sum(it->second, at);
    return d - f;
  }
  Rat s = -f;
  for (int c : t.children(u)) {
    // P_u(c): per-request hinges against distance to u.
    Rat p(0);
    for (const auto& [leaf, qs] : by_leaf) {
      if (!t.is_ancestor_node(c, leaf)) continue;
      Rat d = t.dist_to_ancestor(leaf, u);
      for (const Request* q : qs) {
        Rat v = delay_at(*q, at) - d;
        if (v > 0) p += v;
      }
    }
    Rat best = rat_max(Rat(0), rat_max(p, s_value(t, c, f, by_leaf, at)));
    s += best;
  }
  return s;
}

PLFn s_fn(const Tree& t, int u, const Rat& f,
          const std::map<int, RequestList>& by_leaf, const Rat& t0) {
  if (t.is_leaf(u)) {
    auto it = by_leaf.find(u);
    PLFn d = it == by_leaf.end() ? PLFn::constant(t0, Rat(0))
                                 : leaf_delay_fn(it->second, t0);
    return d - f;
  }
  PLFn s = PLFn::constant(t0, -f);
  for (int c : t.children(u)) {
    PLFn p = PLFn::constant(t0, Rat(0));
    for (const auto& [leaf, qs] : by_leaf) {
      if (!t.is_ancestor_node(c, leaf)) continue;
      Rat d = t.dist_to_ancestor(leaf, u);
      for (const Request* q : qs) p = p + (q->curve().tail(t0) - d).max0();
    }
    PLFn best = PLFn::max(p, s_fn(t, c, f, by_leaf, t0)).max0();
    s = s + best;
  }
  return s;
}

void s_witness(const Tree& t, int u, const Rat& f,
               const std::map<int, RequestList>& by_leaf, const Rat& at,
               RequestList& out) {
  if (t.is_leaf(u)) {
    auto it = by_leaf.find(u);
    if (it != by_leaf.end())
      for (const Request* q : it->second) out.push_back(q);
    return;
  }
  for (int c : t.children(u)) {
    Rat p(0);
    RequestList p_set;
    for (const auto& [leaf, qs] : by_leaf) {
      if (!t.is_ancestor_node(c, leaf)) continue;
      Rat d = t.dist_to_ancestor(leaf, u);
      for (const Request* q : qs) {
        Rat v = delay_at(*q, at) - d;
        if (v > 0) {
          p += v;
          p_set.push_back(q);
        }
      }
    }
    Rat sc = s_value(t, c, f, by_leaf, at);
    Rat best = rat_max(Rat(0), rat_max(p, sc));
    if (best == 0) continue;
    if (p >= sc)
      out.insert(out.end(), p_set.begin(), p_set.end());
    else
      s_witness(t, c, f, by_leaf, at, out);
  }
}

}  // namespace

Rat fl_critical_surplus(const Tree& t, int u, const Rat& f,
                        const RequestList& pending, const Rat& at) {
  return s_value(t, u, f, group_by_leaf(t, u, pending), at);
}

PLFn fl_critical_fn(const Tree& t, int u, const Rat& f, const RequestList& pending,
                    const Rat& t0) {
  return s_fn(t, u, f, group_by_leaf(t, u, pending), t0);
}

MaybeTime earliest_fl_critical(const Tree& t, int u, const Rat& f,
                               const RequestList& pending, const Rat& t0) {
  return fl_critical_fn(t, u, f, pending, t0).crossing(Rat(0));
}

RequestList fl_critical_witness(const Tree& t, int u, const Rat& f,
                                const RequestList& pending, const Rat& at) {
  RequestList out;
  s_witness(t, u, f, group_by_leaf(t, u, pending), at, out);
  return out;
}

Rat psi(const Tree& t, int u, const RequestList& q, const Rat& f) {
  if (q.empty()) return 0;
  Rat cost = f;
  for (int c : t.children(u)) {
    RequestList sub;
    Rat connect_up(0);
    for (const Request* r : q) {
      if (!t.is_ancestor_node(c, r->leaf)) continue;
      sub.push_back(r);
      connect_up += t.dist_to_ancestor(r->leaf, u);
    }
    if (sub.empty()) continue;
    cost += rat_min(connect_up, psi(t, c, sub, f));
  }
  return cost;
}

PromotedView promoted_view(const Tree& t, int edge) {
  if (t.is_root(edge)) throw Error("promoted view needs an edge");
  PromotedView v;
  v.edge = edge;
  for (int s : t.children(t.parent(edge)))
    if (s != edge && t.weight(s) < t.weight(edge)) v.siblings.push_back(s);
  return v;
}

Rat promoted_surplus(const Tree& t, const PromotedView& v, const RequestList& pending,
                     const Rat& at) {
  Rat s(0);
  for (int c : v.siblings) {
    Rat gc = saturation_surplus(t, c, pending, at) - t.weight(c);
    if (gc > 0) s += gc;
  }
  return s;
}

PLFn promoted_fn(const Tree& t, const PromotedView& v, const RequestList& pending,
                 const Rat& t0) {
  PLFn s = PLFn::constant(t0, Rat(0));
  for (int c : v.siblings)
    s = s + (saturation_fn(t, c, pending, t0) - t.weight(c)).max0();
  return s;
}

MaybeTime earliest_promoted_saturation(const Tree& t, const PromotedView& v,
                                       const RequestList& pending, const Rat& t0) {
  return promoted_fn(t, v, pending, t0).crossing(t.weight(v.edge));
}

Rat promoted_spanned_weight(const Tree& t, const PromotedView& v,
                            const std::vector<int>& leaf_nodes) {
  Rat total = t.weight(v.edge);
  for (int c : v.siblings) {
    std::vector<int> under;
    for (int leaf : leaf_nodes)
      if (t.is_ancestor_node(c, leaf)) under.push_back(leaf);
    if (!under.empty()) total += t.spanned_weight_edge(c, under);
  }
  return total;
}

}  // namespace md
