#pragma once

#include <vector>

#include "instance.hpp"
#include "plfn.hpp"
#include "tree.hpp"

namespace md {

// The algorithms' triggers are stated existentially ("the earliest time such
// that there exists a set of requests ..."). Both detectors reduce to
// polynomial DPs over the tree whose values, as functions of time, are
// piecewise linear; the earliest trigger time is then an exact crossing
// query.
//
//   g(e,t)  = max over Q subsets of pending requests in T_e of
//             d_Q(t) - (w(T_e^Q) - w(e)),    empty Q giving 0.
//             T_e is saturated iff g(e,t) >= w(e).
//   S(u,t)  = max(-f, max over nonempty Q in T_u of d_Q(t) - psi_u(Q)).
//             A set under u is "critical" iff S(u,t) >= 0.
//
// Pending sets handed to these functions are quarantine-frozen snapshots: all
// requests must be released at or before the query time.

using RequestList = std::vector<const Request*>;

// g(e,t) and its time view. `pending` may contain requests anywhere in the
// tree; only those inside T_e participate.
Rat saturation_surplus(const Tree& t, int edge, const RequestList& pending,
                       const Rat& at);
PLFn saturation_fn(const Tree& t, int edge, const RequestList& pending,
                   const Rat& t0);
// Earliest time >= t0 with g(e,t) >= w(e); nullopt when no pending requests
// in T_e can ever saturate it (i.e. none exist).
MaybeTime earliest_saturation(const Tree& t, int edge, const RequestList& pending,
                              const Rat& t0);
// A subset attaining g(e,at).
RequestList saturation_witness(const Tree& t, int edge, const RequestList& pending,
                               const Rat& at);

// P(u,t) = sum over pending q in T_u of max(0, d_q(t) - delta(u, v_q)).
// Separable per request.
Rat fl_connection_surplus(const Tree& t, int u, const RequestList& pending,
                          const Rat& at);

// S(u,t) for facility cost f, and the earliest time >= t0 with S >= 0.
Rat fl_critical_surplus(const Tree& t, int u, const Rat& f,
                        const RequestList& pending, const Rat& at);
PLFn fl_critical_fn(const Tree& t, int u, const Rat& f, const RequestList& pending,
                    const Rat& t0);
MaybeTime earliest_fl_critical(const Tree& t, int u, const Rat& f,
                               const RequestList& pending, const Rat& t0);
RequestList fl_critical_witness(const Tree& t, int u, const Rat& f,
                                const RequestList& pending, const Rat& at);

// psi_u(Q): cost of the minimum-cost ancestor-closed solution for Q under u,
// via the decomposition
//   psi_u(Q) = f + sum over children u' of
//              min( sum_{q in Q cap T_u'} delta(u, v_q), psi_u'(Q cap T_u') )
// with empty-child terms contributing 0. psi_u({}) = 0.
Rat psi(const Tree& t, int u, const RequestList& q, const Rat& f);

// Saturation view of a promoted relative subtree: e is treated as the root
// edge whose children are its strictly lighter sibling edges (their real
// subtrees unchanged). Requests at e's own bottom node are not part of the
// view.
struct PromotedView {
  int edge;                   // the promoted edge e
  std::vector<int> siblings;  // C(e): lighter sibling edges
};
PromotedView promoted_view(const Tree& t, int edge);
Rat promoted_surplus(const Tree& t, const PromotedView& v, const RequestList& pending,
                     const Rat& at);
PLFn promoted_fn(const Tree& t, const PromotedView& v, const RequestList& pending,
                 const Rat& t0);
MaybeTime earliest_promoted_saturation(const Tree& t, const PromotedView& v,
                                       const RequestList& pending, const Rat& t0);
// w(R_e^Q) for the witness checks.
Rat promoted_spanned_weight(const Tree& t, const PromotedView& v,
                            const std::vector<int>& leaf_nodes);

}  // namespace md
