#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plfn.hpp"
#include "rational.hpp"
#include "tree.hpp"

namespace md {

enum class Problem { FlDeadline, FlDelay, Mad, Osd };

std::string problem_name(Problem p);
Problem problem_from_name(const std::string& s);

// A deadline is kept as a hard constraint, not as a steep delay ramp; the
// deadline algorithm manipulates deadlines directly.
struct Deadline {
  Rat at;
};

// Continuous non-decreasing delay curve: value 0 at the release time, linear
// between breakpoints, positive slope after the last one (so that the delay
// tends to infinity).
struct PiecewiseDelay {
  std::vector<std::pair<Rat, Rat>> breakpoints;  // (time, value), first is (r_q, 0)
  Rat final_slope;

  Rat eval(const Rat& t) const;
  // Earliest t >= t0 with value >= target.
  Rat crossing(const Rat& target, const Rat& t0) const;
  // View of the curve on [t0, +inf).
  PLFn tail(const Rat& t0) const;
};

using DelaySpec = std::variant<Deadline, PiecewiseDelay>;

struct Request {
  int id = -1;
  int leaf = -1;  // node id in the tree (or point index before embedding)
  Rat release;
  DelaySpec delay;

  bool has_deadline() const { return std::holds_alternative<Deadline>(delay); }
  const Rat& deadline() const { return std::get<Deadline>(delay).at; }
  const PiecewiseDelay& curve() const { return std::get<PiecewiseDelay>(delay); }
};

// Evaluates the delay curve; rejects deadline specs (deadline requests carry
// no delay curve and are handled by deadline-specific logic).
Rat delay_at(const Request& q, const Rat& t);
Rat delay_crossing(const Request& q, const Rat& target, const Rat& t0);

struct MetricInput {
  // Exactly one of the two is populated.
  std::optional<MetricSpace> matrix;
  std::optional<std::vector<std::pair<Rat, Rat>>> points;  // L1 plane points

  bool is_tree = false;
};

struct Instance {
  std::string name;
  Problem problem = Problem::FlDeadline;

  // Tree form (native tree instances, or the result of embedding).
  std::optional<Tree> tree;
  // Metric form (needs embedding before running).
  std::optional<MetricSpace> metric;
  std::optional<std::vector<std::pair<Rat, Rat>>> points;

  std::optional<Rat> f;          // facility opening cost (FL problems)
  std::optional<int> server_start;  // start leaf (OSD)

  std::vector<Request> requests;

  bool has_tree() const { return tree.has_value(); }
  const Tree& the_tree() const {
    if (!tree) throw Error("instance has no tree form; embed it first");
    return *tree;
  }
  const Rat& opening_cost() const {
    if (!f) throw Error("instance has no facility cost f");
    return *f;
  }
};

// Load-time validation. Checks the tree/metric shape, that requests sit on
// leaves, the delay-spec kind expected by the problem, and the facility
// preconditions w(e) <= f and root-to-leaf path weight <= f.
void validate_instance(const Instance& inst);

// The MAD algorithms operate on a tree rooted at a single root edge. When the
// root has several children the instance splits into independent
// sub-instances, one per root child.
struct MadSubInstance {
  Tree tree;             // rooted at a single root edge
  std::vector<Request> requests;  // leaf ids remapped into `tree`
  std::vector<int> request_ids;   // original ids, index-aligned with requests
};
std::vector<MadSubInstance> split_mad_instance(const Instance& inst);

}  // namespace md
