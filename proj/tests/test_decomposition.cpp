#include <doctest.h>

#include "common.hpp"
#include "shiftforge/block_ops.hpp"
#include "shiftforge/decomposition.hpp"
#include "shiftforge/sampler.hpp"

using namespace shiftforge;
using testutil::e1;
using testutil::e2;

namespace {

DecomposeOptions quick() {
  DecomposeOptions o;
  o.verify = false;
  return o;
}

std::set<Element> elements_of(const SubgroupPtr& h) {
  return {h->elements().begin(), h->elements().end()};
}

}  // namespace

TEST_CASE("H is N intersected with the kernel") {
  auto z4 = testutil::fixture("z4_coset.json").shift;
  CHECK(elements_of(compute_H(*z4)) == std::set<Element>{e1(0), e1(2)});

  auto pf = testutil::fixture("prufer_fractal.json").shift;
  auto hp = compute_H(*pf);
  CHECK(hp->is_trivial_known());
  CHECK(hp->contains(pf->alphabet->identity()));
  CHECK_FALSE(hp->contains(e2(1, 1)));

  auto full = testutil::fixture("full_z2.json").shift;
  CHECK(compute_H(*full)->order() == std::optional<std::size_t>(2));
}

TEST_CASE("follower-set shift") {
  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto q = follower_set_shift(*z4);
  REQUIRE(q->alphabet->order() == std::optional<std::size_t>(2));
  for (const auto& a : q->alphabet->prefix(2))
    for (const auto& b : q->alphabet->prefix(2)) CHECK(transition_allowed(*q, a, b) == (a == b));

  auto pf = testutil::fixture("prufer_fractal.json").shift;
  CHECK(same_stage_data(*follower_set_shift(*pf), *pf, 16));

  auto id2 = testutil::fixture("identity_z2.json").shift;
  CHECK(same_stage_data(*follower_set_shift(*id2), *id2, 16));
}

TEST_CASE("theta code") {
  auto pf = testutil::fixture("prufer_fractal.json").shift;
  auto tc = theta_code(pf);
  auto e = Sequence::constant(Axis::TwoSided, pf->alphabet->identity());
  CHECK(tc.forward(e) == Sequence::constant(Axis::TwoSided, tc.image->alphabet->identity()));
  for (const auto& x : walk_patterns(*pf, 40, 5)) {
    auto y = tc.forward(x);
    CHECK(tc.inverse(y) == x);
    CHECK(y.length() == x.length());
  }
  // A walk e, [1,1], [1,2], ... built by hand: each letter lies in the follower set of the previous one.
  Word walk{e2(0, 1), e2(1, 1), e2(1, 2), e2(1, 3), e2(1, 4)};
  REQUIRE(in_language(*pf, walk));
  auto x = Sequence::left_ray({e2(0, 1)}, walk, 4);
  CHECK(tc.inverse(tc.forward(x)) == x);

  try {
    theta_code(testutil::fixture("z4_coset.json").shift);
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.code() == Errc::HNotTrivial);
  }
}

TEST_CASE("hat shift") {
  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto h = hat_shift(z4);
  CHECK(h.quotient->order() == std::optional<std::size_t>(2));
  CHECK(h.h_alphabet->order() == std::optional<std::size_t>(2));
  for (const auto& a : h.hat->alphabet->prefix(2))
    for (const auto& b : h.hat->alphabet->prefix(2)) CHECK(transition_allowed(*h.hat, a, b) == (a == b));

  auto pf = testutil::fixture("prufer_fractal.json").shift;
  auto hp = hat_shift(pf);
  CHECK(hp.h_alphabet->order() == std::optional<std::size_t>(1));
  CHECK(same_stage_data(*hp.hat, *pf, 16));

  auto full = testutil::fixture("full_z2.json").shift;
  auto hf = hat_shift(full);
  CHECK(hf.quotient->order() == std::optional<std::size_t>(1));
  CHECK(hf.h_alphabet->order() == std::optional<std::size_t>(2));
}

TEST_CASE("phi code") {
  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto pc = phi_code(z4);
  // 3 lies in 1 + H; S(1 + H) = 1 and 1^-1 3 = 2.
  auto x3 = Sequence::constant(Axis::TwoSided, e1(3));
  CHECK(pc.forward(x3) == Sequence::constant(Axis::TwoSided, e2(1, 2)));
  CHECK(pc.inverse(pc.forward(x3)) == x3);
  CHECK(pc.forward(Sequence::empty(Axis::TwoSided)).is_empty());
  CHECK(pc.forward(Sequence::constant(Axis::TwoSided, e1(0))) == Sequence::constant(Axis::TwoSided, e2(0, 0)));
  for (const auto& x : enumerate_members(*z4, 2, 2)) {
    auto y = pc.forward(x);
    CHECK(contains(*pc.image, y));
    CHECK(pc.inverse(y) == x);
    for (Index i = -4; i <= 4; ++i) {
      if (!x.at(i)) continue;
      // Letter by letter: a -> (a mod 2, a - (a mod 2)).
      const long long a = static_cast<long long>((*x.at(i))[0]);
      CHECK(*y.at(i) == e2(a % 2, a - a % 2));
    }
  }
}

TEST_CASE("fractal classification") {
  auto pf = is_fractal(testutil::fixture("prufer_fractal.json").shift, 4);
  CHECK(pf.kind == FractalReport::Kind::SelfSimilar);
  CHECK(pf.level == 1);

  auto z4 = is_fractal(testutil::fixture("z4_coset.json").shift);
  CHECK(z4.kind == FractalReport::Kind::NonFractal);
  CHECK(z4.level == 0);
  CHECK(z4.h_order == std::optional<std::size_t>(2));

  auto id2 = is_fractal(testutil::fixture("identity_z2.json").shift);
  CHECK(id2.kind == FractalReport::Kind::Fractal);
}

TEST_CASE("decompose structure") {
  auto z4 = decompose(testutil::fixture("z4_coset.json").shift, quick());
  CHECK(z4.phi_steps == 1);
  CHECK(z4.theta_steps == 1);
  REQUIRE(z4.h_list.size() == 1);
  CHECK(z4.h_list[0]->order() == std::optional<std::size_t>(2));
  REQUIRE(z4.fractal->alphabet->order() == std::optional<std::size_t>(2));
  for (const auto& a : z4.fractal->alphabet->prefix(2))
    for (const auto& b : z4.fractal->alphabet->prefix(2)) CHECK(transition_allowed(*z4.fractal, a, b) == (a == b));
  CHECK(z4.fractal_report.kind == FractalReport::Kind::Fractal);
  auto j = z4.to_json(false);
  CHECK(j["alphabet_bookkeeping"]["product"] == 4);
  CHECK(j["alphabet_bookkeeping"]["holds"] == true);

  auto pf = decompose(testutil::fixture("prufer_fractal.json").shift, quick());
  CHECK(pf.h_list.empty());
  CHECK(pf.phi_steps == 0);
  CHECK(pf.theta_steps == 0);
  CHECK(same_stage_data(*pf.fractal, *pf.input, 16));

  auto full = decompose(testutil::fixture("full_z2.json").shift, quick());
  REQUIRE(full.h_list.size() == 1);
  CHECK(full.h_list[0]->order() == std::optional<std::size_t>(2));
  CHECK(full.fractal->alphabet->order() == std::optional<std::size_t>(1));
}

TEST_CASE("decompose rejects unsupported inputs with an input error") {
  for (const char* f : {"parity.json", "product_z2_z2.json"}) {
    try {
      decompose(testutil::fixture(f).shift, quick());
      CHECK_MESSAGE(false, f);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Unsupported);
    }
  }
}

TEST_CASE("decompose conjugacy on Z4 members") {
  auto r = decompose(testutil::fixture("z4_coset.json").shift, quick());
  const Group& g = *r.input->alphabet;
  auto xs = enumerate_members(*r.input, 2, 2);
  std::set<Sequence> images;
  for (const auto& x : xs) {
    auto y = r.forward(x);
    CHECK(contains(*r.target, y));
    CHECK(r.inverse(y) == x);
    CHECK(shift(y) == r.forward(shift(x)));
    images.insert(y);
  }
  CHECK(images.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); i += 5)
    for (std::size_t k = 0; k < xs.size(); k += 9)
      CHECK(r.inverse(r.star(r.forward(xs[i]), r.forward(xs[k]))) == apply_op(g, xs[i], xs[k]));
}
