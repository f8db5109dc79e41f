#include <doctest.h>

#include "instance.hpp"
#include "plfn.hpp"
#include "test_helpers.hpp"

using namespace md;
using namespace mdtest;

TEST_CASE("delay curve evaluation and crossing") {
  PiecewiseDelay d;
  d.breakpoints = {{R(0), R(0)}, {R(2), R(3)}};
  d.final_slope = R(1);
  CHECK(d.eval(R(2)) == R(3));
  CHECK(d.eval(R(1)) == R(3, 2));
  CHECK(d.crossing(R(5), R(0)) == R(4));
  CHECK(d.crossing(R(0), R(1)) == R(1));  // non-strict crossing at t0

  Request q = linear_request(0, 1, R(0), R(1));
  CHECK(delay_at(q, R(7)) == R(7));
  Request dead = deadline_request(1, 1, R(0), R(5));
  CHECK_THROWS(delay_at(dead, R(1)));
  CHECK_THROWS(delay_crossing(dead, R(1), R(0)));
}

TEST_CASE("plfn algebra matches pointwise evaluation") {
  Prng rng(3);
  for (int it = 0; it < 80; ++it) {
    // Two random nondecreasing curves on [0, inf).
    auto random_fn = [&]() {
      std::vector<std::pair<Rat, Rat>> pts;
      Rat t(0), v((long)rng.below(4));
      pts.emplace_back(t, v);
      int k = (int)rng.below(3);
      for (int i = 0; i < k; ++i) {
        t += Rat(1 + (long)rng.below(6), 2);
        v += Rat((long)rng.below(5), 2);
        pts.emplace_back(t, v);
      }
      return PLFn::from_points(pts, Rat((long)rng.below(4), 2));
    };
    PLFn a = random_fn(), b = random_fn();
    PLFn sum = a + b;
    PLFn mx = PLFn::max(a, b);
    for (long i = 0; i <= 40; ++i) {
      Rat t(i, 2);
      CHECK(sum.eval(t) == a.eval(t) + b.eval(t));
      CHECK(mx.eval(t) == rat_max(a.eval(t), b.eval(t)));
    }
    CHECK(sum.non_decreasing());
    CHECK(mx.non_decreasing());

    // Crossing minimality: value below target strictly before the crossing.
    Rat target = Rat(1 + (long)rng.below(12), 2);
    auto c = sum.crossing(target);
    if (c) {
      CHECK(sum.eval(*c) >= target);
      Rat before = *c - Rat(1, 1000);
      if (before >= sum.start()) CHECK(sum.eval(before) < target);
      // Grid scan confirms nothing earlier crosses.
      for (long i = 0; i <= 200; ++i) {
        Rat t = sum.start() + Rat(i, 10);
        if (t >= *c) break;
        CHECK(sum.eval(t) < target);
      }
    } else {
      CHECK(sum.final_slope() == 0);
    }
  }
}

TEST_CASE("plfn hinge and shift") {
  PLFn f = PLFn::from_points({{R(0), R(0)}}, R(1));  // f(t) = t
  PLFn hinged = (f - R(3)).max0();
  CHECK(hinged.eval(R(2)) == R(0));
  CHECK(hinged.eval(R(3)) == R(0));
  CHECK(hinged.eval(R(5)) == R(2));
  auto c = hinged.crossing(R(4));
  REQUIRE(c.has_value());
  CHECK(*c == R(7));

  PLFn zero = PLFn::constant(R(0), R(0));
  CHECK(!zero.crossing(R(1)).has_value());
  CHECK(zero.crossing(R(0)).has_value());
}

TEST_CASE("delay tail view") {
  PiecewiseDelay d;
  d.breakpoints = {{R(0), R(0)}, {R(4), R(2)}, {R(6), R(2)}};
  d.final_slope = R(3);
  PLFn tail = d.tail(R(3));
  CHECK(tail.start() == R(3));
  CHECK(tail.eval(R(3)) == R(3, 2));
  CHECK(tail.eval(R(5)) == R(2));
  CHECK(tail.eval(R(8)) == R(8));
  CHECK(tail.non_decreasing());
}
