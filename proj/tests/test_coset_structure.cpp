#include <doctest.h>

#include "common.hpp"
#include "shiftforge/coset_structure.hpp"

using namespace shiftforge;
using testutil::e1;
using testutil::e2;

namespace {

bool odd(long long v) { return v % 2 != 0; }

}  // namespace

TEST_CASE("identity follower subgroups") {
  auto par = testutil::fixture("parity.json").shift;
  auto ev = follower_subgroup(*par, 2, 1);
  for (long long v = -7; v <= 7; ++v) CHECK(ev->contains(e1(v)) == !odd(v));

  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto n = follower_subgroup(*z4, 1, 1);
  REQUIRE(n->order() == std::optional<std::size_t>(2));
  for (long long v = 0; v < 4; ++v) CHECK(n->contains(e1(v)) == (v % 2 == 0));

  auto full = make_full_shift(make_cyclic(3), Axis::TwoSided);
  auto all = follower_subgroup(*full, 2, 2);
  CHECK(all->order() == std::optional<std::size_t>(9));
}

TEST_CASE("follower sets are cosets") {
  auto par = testutil::fixture("parity.json").shift;
  auto f = follower_coset(*par, {e1(1), e1(2)}, 2);
  // x_{i+2} has the parity of x_i: the next two letters are odd then even.
  for (long long u = -4; u <= 4; ++u)
    for (long long v = -4; v <= 4; ++v) CHECK(coset_contains(f, e2(u, v)) == (odd(u) && !odd(v)));
  CHECK(coset_law_check(*par, {e1(1), e1(2)}, 2).holds);

  auto pf = testutil::fixture("prufer_fractal.json").shift;
  auto fp = follower_coset(*pf, {e2(1, 1)}, 1);
  CHECK(coset_contains(fp, e2(1, 2)));
  CHECK(coset_contains(fp, e2(3, 2)));
  CHECK_FALSE(coset_contains(fp, e2(1, 1)));
  CHECK_FALSE(coset_contains(fp, e2(1, 4)));
  CHECK(coset_law_check(*pf, {e2(1, 1)}, 1).holds);

  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto f4 = follower_coset(*z4, {e1(1)}, 1);
  for (long long v = 0; v < 4; ++v) CHECK(coset_contains(f4, e1(v)) == odd(v));
  CHECK(coset_law_check(*z4, {e1(1)}, 1).holds);
}

TEST_CASE("product law") {
  auto z4 = testutil::fixture("z4_coset.json").shift;
  for (long long a = 0; a < 4; ++a)
    for (long long b = 0; b < 4; ++b) CHECK(product_law_check(*z4, {e1(a)}, {e1(b)}, 2).holds);
  auto par = testutil::fixture("parity.json").shift;
  CHECK(product_law_check(*par, {e1(1), e1(2)}, {e1(3), e1(-1)}, 2).holds);
}

TEST_CASE("predecessor cosets") {
  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto p = follower_coset(*z4, {e1(3)}, 1, Side::Predecessor);
  for (long long v = 0; v < 4; ++v) CHECK(coset_contains(p, e1(v)) == odd(v));
}

TEST_CASE("class families") {
  auto par = testutil::fixture("parity.json").shift;
  CHECK(class_family(*par, 1, 1, Side::Follower, 8).classes.size() == 1);
  CHECK(class_family(*par, 1, 2, Side::Follower, 8).classes.size() == 2);
  auto f22 = class_family(*par, 2, 2, Side::Follower, 8);
  CHECK(f22.classes.size() == 4);
  CHECK(f22.stabilized);
  CHECK(f22.disjoint);
  CHECK(f22.product_closed);

  auto z2 = testutil::fixture("z2_second.json").shift;
  auto fz = class_family(*z2, 1, 1, Side::Follower, 8);
  CHECK_FALSE(fz.stabilized);
  CHECK(fz.disjoint);
  // Oracle: the classes are Z x {c}, one per second coordinate among the letters searched.
  std::set<Integer> seen;
  for (const auto& e : z2->alphabet->prefix(8)) seen.insert(e[1]);
  CHECK(fz.classes.size() == seen.size());
  CHECK(fz.classes.size() > 1);
  std::set<Integer> seconds;
  for (const auto& w : fz.sources) seconds.insert(w.back()[1]);
  CHECK(seconds == seen);

  auto full = make_full_shift(make_cyclic(2), Axis::TwoSided);
  auto both = class_families(*full, 2, 2);
  CHECK(both.follower.classes.size() == 1);
  CHECK(both.predecessor.classes.size() == 1);
}

TEST_CASE("tau bijection") {
  auto par = testutil::fixture("parity.json").shift;
  auto t = tau_bijection(*par, 2, 2, 8);
  CHECK(t.classes == 4);
  CHECK(t.targets == 4);
  CHECK(t.well_defined);
  CHECK(t.injective);
  CHECK(t.multiplicative);

  auto full = make_full_shift(make_cyclic(3), Axis::TwoSided);
  auto tf = tau_bijection(*full, 1, 1);
  CHECK(tf.classes == 1);
  CHECK(tf.targets == 1);

  auto pf = testutil::fixture("prufer_fractal.json").shift;
  auto tp = tau_bijection(*pf, 1, 1, 16);
  CHECK(tp.well_defined);
  CHECK(tp.injective);
  CHECK(tp.multiplicative);
  CHECK(tp.classes >= 4);
}

TEST_CASE("subgroup check reports a closure witness") {
  auto g = make_cyclic(6);
  auto h = make_predicate_subgroup(g, "one_or_zero", [](const Element& x) { return x[0] <= 1; });
  auto r = check_subgroup(*h, 16);
  CHECK_FALSE(r.closed);
  CHECK(check_subgroup(*make_finite_subgroup(g, {e1(0), e1(3)}, "N"), 16).closed);
}
