#include <doctest.h>

#include <numeric>

#include "common.hpp"
#include "shiftforge/sequence.hpp"

using namespace shiftforge;
using testutil::e1;

namespace {

const Element a = e1(0), b = e1(1), c = e1(2);

// Smallest p > 0 with x_i = x_{i+p} on [lo, hi].
Index observed_period(const Sequence& x, Index lo, Index hi) {
  for (Index p = 1; p <= hi - lo; ++p) {
    bool ok = true;
    for (Index i = lo; i + p <= hi && ok; ++i) ok = x.at(i) == x.at(i + p);
    if (ok) return p;
  }
  return hi - lo;
}

}  // namespace

TEST_CASE("entry access") {
  CHECK_FALSE(Sequence::finite({a, b}).at(5).has_value());
  auto bi = Sequence::periodic({a}, {b}, {a}, 0);
  CHECK(bi.at(0) == Letter(b));
  CHECK(bi.at(-3) == Letter(a));
  CHECK(bi.at(4) == Letter(a));
  auto ray = Sequence::left_ray({a}, {}, 3);
  CHECK(ray.at(3) == Letter(a));
  CHECK_FALSE(ray.at(4).has_value());
  CHECK_THROWS_AS(Sequence::finite({a}).at(-1), Error);
}

TEST_CASE("length is the last occupied index") {
  CHECK(Sequence::finite({a, b, c}).length() == 2);
  CHECK(Sequence::empty(Axis::OneSided).length() == kNegInf);
  CHECK(Sequence::infinite({}, {a}).length() == kPosInf);
}

TEST_CASE("shift") {
  CHECK(shift(Sequence::empty(Axis::OneSided)).is_empty());
  CHECK(shift(Sequence::empty(Axis::TwoSided)).is_empty());
  CHECK(shift(Sequence::finite({a, b, c})) == Sequence::finite({b, c}));
  CHECK(shift(Sequence::finite({a, b, c})).length() == 1);
  auto x = Sequence::periodic({a, b}, {}, {a, b}, 0);
  auto y = shift(x);
  for (Index i = -6; i < 6; ++i) CHECK(y.at(i) == x.at(i + 1));
  CHECK(shift(y) == x);
  CHECK(shift_by(x, 2) == x);
}

TEST_CASE("normal form makes equal sequences compare equal") {
  auto x = Sequence::periodic({a, b}, {a, b}, {a, b, a, b}, 3);
  auto y = Sequence::periodic({b, a}, {}, {b, a}, 0);
  for (Index i = -8; i < 8; ++i) REQUIRE(x.at(i) == y.at(i));
  CHECK(x == y);
  CHECK(Sequence::infinite({a, a}, {a}) == Sequence::constant(Axis::OneSided, a));
}

TEST_CASE("cylinders") {
  Cylinder z;
  z.base = Sequence::finite({a});
  z.excluded = {b};
  CHECK(cylinder_contains(z, Sequence::infinite({a}, {c})));
  CHECK_FALSE(cylinder_contains(z, Sequence::infinite({a, b}, {c})));
  CHECK_FALSE(cylinder_contains(z, Sequence::infinite({}, {c})));

  Cylinder comp;
  comp.kind = Cylinder::Kind::Complement;
  comp.bases = {Sequence::finite({a, b})};
  CHECK(cylinder_contains(comp, Sequence::infinite({b}, {a})));
  CHECK(cylinder_contains(comp, Sequence::infinite({a, a}, {b})));
  CHECK_FALSE(cylinder_contains(comp, Sequence::infinite({a, b}, {c})));
}

TEST_CASE("blocks") {
  auto alt = Sequence::infinite({}, {a, b});
  CHECK(words_of(alt, 2) == std::set<Word>{{a, b}, {b, a}});
  CHECK(blocks_of(Sequence::empty(Axis::OneSided), 3, false).empty());
  CHECK(words_of(Sequence::finite({a, b, c}), 2) == std::set<Word>{{a, b}, {b, c}});
  auto with_empty = blocks_of(Sequence::finite({a, b, c}), 2, true);
  CHECK(with_empty.count(LetterBlock{c, std::nullopt}) == 1);
  CHECK(with_empty.count(LetterBlock{std::nullopt, std::nullopt}) == 1);
}

TEST_CASE("product glue") {
  auto x2 = Sequence::periodic({a, b}, {}, {a, b}, 0);
  auto y3 = Sequence::periodic({a, b, c}, {}, {a, b, c}, 0);
  CHECK(product_glue(Sequence::empty(Axis::TwoSided), y3).is_empty());
  auto g = product_glue(x2, y3);
  CHECK(6 % observed_period(g, -12, 12) == 0);
  for (Index i = -6; i < 6; ++i) CHECK(*g.at(i) == Element::concat(*x2.at(i), *y3.at(i)));
  auto [l, r] = product_split(g, 1);
  CHECK(l == x2);
  CHECK(r == y3);

  auto fin = product_glue(Sequence::finite({a, b}), Sequence::infinite({}, {c}));
  CHECK(fin.kind() == Sequence::Kind::Finite);
  CHECK(fin.length() == 1);
}

TEST_CASE("projection onto non-negative indices") {
  CHECK(project_nonneg(Sequence::empty(Axis::TwoSided)).is_empty());
  CHECK(project_nonneg(Sequence::left_ray({a}, {b}, -1)).is_empty());
  auto x = Sequence::periodic({c}, {a, b}, {b, c}, -1);
  auto p = project_nonneg(x);
  CHECK(p.axis() == Axis::OneSided);
  CHECK(p.kind() == Sequence::Kind::Infinite);
  for (Index i = 0; i < 10; ++i) CHECK(p.at(i) == x.at(i));
}

TEST_CASE("sequence json round trip") {
  auto g = make_cyclic(3);
  for (const auto& x : {Sequence::periodic({a}, {b, c}, {c, a}, 2), Sequence::left_ray({b}, {c}, 4),
                        Sequence::empty(Axis::TwoSided), Sequence::constant(Axis::TwoSided, c)})
    CHECK(sequence_from_json(*g, Axis::TwoSided, sequence_to_json(*g, x)) == x);
}
