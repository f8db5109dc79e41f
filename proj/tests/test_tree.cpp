#include <doctest.h>

#include "test_helpers.hpp"
#include "tree.hpp"

using namespace md;
using namespace mdtest;

TEST_CASE("metric validation") {
  MetricSpace two;
  two.dist = {{R(0), R(5)}, {R(5), R(0)}};
  CHECK(!validate_metric(two));

  MetricSpace bad;
  bad.dist = {{R(0), R(1), R(10)}, {R(1), R(0), R(2)}, {R(10), R(2), R(0)}};
  auto v = validate_metric(bad);
  REQUIRE(v.has_value());
  CHECK(v->message.find("triangle") != std::string::npos);

  MetricSpace one;
  one.dist = {{R(0)}};
  CHECK(!validate_metric(one));

  MetricSpace asym;
  asym.dist = {{R(0), R(1)}, {R(2), R(0)}};
  CHECK(validate_metric(asym).has_value());
}

TEST_CASE("hst validation") {
  CHECK(!validate_hst(chain({R(4), R(2)}), R(2)));
  CHECK(validate_hst(chain({R(4), R(3)}), R(2)).has_value());
  CHECK(validate_hst(chain({R(4), R(4)}), R(2)).has_value());

  // Monotone in beta: a certificate at beta holds for any smaller beta.
  Prng rng(7);
  for (int it = 0; it < 50; ++it) {
    Tree t = random_test_hst(rng, 2 + (int)rng.below(6), 2 + (int)rng.below(3));
    CHECK(!validate_hst(t, R(2)));
    CHECK(!validate_hst(t, R(3, 2)));
    CHECK(!validate_hst(t, R(1)));
  }

  auto cert = hst_certificate(chain({R(4), R(2), R(1)}), R(2));
  CHECK(cert.is_pow2);
  CHECK(!hst_certificate(chain({R(6), R(3)}), R(2)).is_pow2);
}

TEST_CASE("spanned weight") {
  // r(w=4) over two leaf edges w=1 each.
  Tree t(4, 0, {-1, 0, 1, 1}, {R(0), R(4), R(1), R(1)});
  CHECK(t.spanned_weight_edge(1, {2, 3}) == R(6));
  CHECK(t.spanned_weight_edge(1, {2}) == R(5));
  CHECK(t.spanned_weight_edge(1, {}) == R(4));
  CHECK(t.spanned_weight_node(0, {2, 3}) == R(6));
  CHECK(t.spanned_weight_node(1, {2}) == R(1));
  CHECK(t.spanned_weight_node(0, {}) == R(0));
  CHECK_THROWS(t.spanned_weight_edge(2, {3}));

  // Path-union subadditivity for edge-rooted subtrees.
  Prng rng(21);
  for (int it = 0; it < 40; ++it) {
    Tree h = random_test_hst(rng, 3 + (int)rng.below(6), 3);
    auto leaves = h.leaves();
    int e = h.children(h.root()).front();
    std::vector<int> q1, q2, both;
    for (int leaf : leaves) {
      if (!h.in_edge_subtree(e, leaf)) continue;
      bool a = rng.below(2) == 0, b = rng.below(2) == 0;
      if (a) q1.push_back(leaf);
      if (b) q2.push_back(leaf);
      if (a || b) both.push_back(leaf);
    }
    CHECK(h.spanned_weight_edge(e, both) <=
          h.spanned_weight_edge(e, q1) + h.spanned_weight_edge(e, q2));
  }
}

TEST_CASE("tree structure and distances") {
  Tree t = chain({R(4), R(2), R(1)});
  CHECK(t.problem_depth() == 3);
  CHECK(t.depth(3) == 3);
  CHECK(t.edge_height(1) == 3);
  CHECK(t.edge_height(3) == 1);
  CHECK(t.dist(0, 3) == R(7));
  CHECK(t.dist(3, 0) == R(7));
  CHECK(t.dist_to_ancestor(3, 1) == R(3));
  CHECK(t.lca(3, 0) == 0);

  Tree s = star(3, R(2));
  CHECK(s.dist(1, 2) == R(4));
  CHECK(s.leaves().size() == 3);

  CHECK_THROWS(Tree(2, 0, {-1, 1}, {R(0), R(1)}));
  CHECK_THROWS(Tree(2, 0, {-1, 0}, {R(0), R(0)}));
  CHECK_THROWS(Tree(3, 0, {-1, 0, 2}, {R(0), R(1), R(1)}));
}
