#include <doctest.h>

#include "common.hpp"
#include "shiftforge/block_ops.hpp"
#include "shiftforge/sampler.hpp"

using namespace shiftforge;
using testutil::e1;

namespace {

// Entrywise integer sum on [lo, hi], empty letter absorbing.
bool sums_match(const Sequence& x, const Sequence& y, const Sequence& r, Index lo, Index hi, long long mod) {
  for (Index i = lo; i <= hi; ++i) {
    Letter a = x.at(i), b = y.at(i), c = r.at(i);
    if (!a || !b) {
      if (c) return false;
      continue;
    }
    if (!c) return false;
    Integer want = (*a)[0] + (*b)[0];
    if (mod) want = floor_mod(want, mod);
    if ((*c)[0] != want) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("entrywise operation") {
  auto z = make_integers();
  auto x = Sequence::periodic({e1(1), e1(-2)}, {e1(5)}, {e1(3), e1(4)}, 0);
  CHECK(apply_op(*z, x, Sequence::empty(Axis::TwoSided)).is_empty());
  CHECK(apply_op(*z, Sequence::constant(Axis::TwoSided, e1(0)), x) == x);

  auto p2 = Sequence::periodic({e1(1), e1(2)}, {}, {e1(1), e1(2)}, 0);
  auto p3 = Sequence::periodic({e1(7), e1(8), e1(9)}, {}, {e1(7), e1(8), e1(9)}, 0);
  auto r = apply_op(*z, p2, p3);
  CHECK(sums_match(p2, p3, r, -20, 20, 0));
  for (Index i = -12; i < 12; ++i) CHECK(r.at(i) == r.at(i + 6));

  auto fin = Sequence::left_ray({e1(1)}, {e1(4)}, 2);
  auto rf = apply_op(*z, fin, p3);
  CHECK(rf.length() == 2);
  CHECK(sums_match(fin, p3, rf, -12, 12, 0));
}

TEST_CASE("inverse and idempotents") {
  auto z4 = testutil::fixture("z4_coset.json").shift;
  const Group& g = *z4->alphabet;
  for (const auto& x : enumerate_members(*z4, 2, 2)) {
    auto ii = inverse_and_idempotents(*z4, x);
    if (x.is_empty()) {
      CHECK(ii.inverse.is_empty());
      CHECK(ii.idempotent.is_empty());
      continue;
    }
    CHECK(contains(*z4, ii.inverse));
    CHECK(ii.idempotent == idempotent(*z4, kPosInf));
    CHECK(apply_op(g, apply_op(g, x, ii.inverse), x) == x);
    CHECK(sums_match(x, ii.inverse, Sequence::constant(Axis::TwoSided, e1(0)), -8, 8, 4));
  }
  auto full = make_full_shift(make_cyclic(3), Axis::TwoSided);
  for (Index n : {-2, 0, 3})
    for (Index m : {-1, 0, 5}) {
      auto en = idempotent(*full, n), em = idempotent(*full, m);
      CHECK(apply_op(*full->alphabet, en, em) == idempotent(*full, std::min(n, m)));
      CHECK(en.length() == n);
    }
}

TEST_CASE("closure") {
  auto z4 = verify_closure(*testutil::fixture("z4_coset.json").shift, 16);
  CHECK(z4.closed);
  CHECK(z4.exact);
  CHECK(z4.pairs_checked == 64);

  CHECK(verify_closure(*testutil::fixture("prufer_fractal.json").shift, 16).closed);

  auto broken = testutil::fixture("broken_closure.json").shift;
  auto br = verify_closure(*broken, 16);
  CHECK_FALSE(br.closed);
  REQUIRE(br.witness.has_value());
  // The witness product must leave the language.
  const Group& g = *broken->alphabet;
  CHECK(in_language(*broken, br.witness->first));
  CHECK(in_language(*broken, br.witness->second));
  CHECK_FALSE(in_language(*broken, multiply_words(g, br.witness->first, br.witness->second)));

  auto serial = verify_closure(*testutil::fixture("parity.json").shift, 8, Exec::Serial);
  auto parallel = verify_closure(*testutil::fixture("parity.json").shift, 8, Exec::Parallel);
  CHECK(serial.to_json(*make_integers()) == parallel.to_json(*make_integers()));
}

TEST_CASE("semigroup classification") {
  auto one = classify_semigroup(*testutil::fixture("full_z2_one_sided.json").shift);
  CHECK(one.is_group);
  CHECK(one.idempotents == IdempotentSet::Top);

  auto two = classify_semigroup(*testutil::fixture("full_z.json").shift);
  CHECK_FALSE(two.is_group);
  CHECK(two.idempotents == IdempotentSet::FullChain);

  auto pf = classify_semigroup(*testutil::fixture("prufer_fractal.json").shift);
  CHECK_FALSE(pf.is_group);
  CHECK(pf.idempotents == IdempotentSet::TopAndZero);
}

TEST_CASE("continuity") {
  auto uni = union_of_cyclic_groups({2, 3}, true);
  CHECK(continuity_check(uni, 12).continuous);

  auto zop = group_op(make_integers());
  CHECK_FALSE(continuity_check(zop, 12).continuous);

  auto zr = continuity_check(*testutil::fixture("full_z_one_sided.json").shift, 10);
  CHECK_FALSE(zr.continuous);
  REQUIRE(zr.witness.contains("pairs"));
  CHECK(zr.witness["pairs"].size() == 10);
  for (const auto& pr : zr.witness["pairs"]) CHECK(pr[0].get<long long>() + pr[1].get<long long>() == 0);

  auto two = continuity_check(*testutil::fixture("full_z.json").shift, 8);
  CHECK_FALSE(two.continuous);
  REQUIRE(two.witness.value("kind", "") == "shifted_pair");
  auto z = make_integers();
  auto x = sequence_from_json(*z, Axis::TwoSided, two.witness["x"]);
  const bool constant = x.left_period() == x.right_period() && x.middle().empty() && x.left_period().size() == 1;
  CHECK_FALSE(constant);
  // Every shift of (x, x*) multiplies to the constant identity sequence.
  auto xs = star(*z, x);
  for (Index n = 0; n < 8; ++n)
    CHECK(sums_match(shift_by(x, n), shift_by(xs, n), Sequence::constant(Axis::TwoSided, e1(0)), -10, 10, 0));

  CHECK(continuity_check(*testutil::fixture("identity_z2.json").shift, 8).continuous);
  CHECK(continuity_check(*testutil::fixture("full_z2_one_sided.json").shift, 8).continuous);
}

TEST_CASE("induced alphabet operation") {
  auto z = make_integers();
  auto letters = group_op(z);
  auto op = induce_alphabet_op([&](const Sequence& x, const Sequence& y) { return apply_op(*z, x, y); }, letters,
                               Axis::OneSided);
  for (const auto& a : z->prefix(9))
    for (const auto& b : z->prefix(9)) CHECK(*op.mul(a, b) == Element{a[0] + b[0]});

  auto zero_div = [&](const Sequence& x, const Sequence& y) {
    if (x.at(0) == Letter(e1(1)) && y.at(0) == Letter(e1(1))) return Sequence::empty(Axis::OneSided);
    return apply_op(*z, x, y);
  };
  try {
    induce_alphabet_op(zero_div, letters, Axis::OneSided);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroDivisorDetected);
  }

  auto uni = union_of_cyclic_groups({2, 3}, false);
  auto seq_op = [&](const Sequence& x, const Sequence& y) { return apply_op(uni, x, y); };
  auto induced = induce_alphabet_op(seq_op, uni, Axis::OneSided);
  // Oracle table on G1 (Z_2) and G2 (Z_3): the product lives in the larger index, else adds mod its size.
  auto letters5 = uni.prefix(5);
  for (const auto& a : letters5)
    for (const auto& b : letters5) {
      Element want = a[0] > b[0] ? a : a[0] < b[0] ? b : Element{a[0], (a[1] + b[1]) % (a[0] == 0 ? 2 : 3)};
      CHECK(*induced.mul(a, b) == want);
    }
}

TEST_CASE("axiom suite is clean on the fixtures") {
  for (const char* f : {"z4_coset.json", "prufer_fractal.json", "parity.json", "full_z.json", "full_z2_one_sided.json",
                        "identity_z2.json", "z2_second.json"}) {
    auto p = testutil::fixture(f).shift;
    auto xs = sample_sequences(*p, 60, 3);
    auto r = axiom_suite(*p, xs, Exec::Parallel);
    CHECK(r.triples == 20);
    CHECK_MESSAGE(r.violations() == 0, f);
    CHECK(r.to_json() == axiom_suite(*p, xs, Exec::Serial).to_json());
  }
}

TEST_CASE("entrywise sums on Z4 members stay in the shift") {
  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto xs = enumerate_members(*z4, 1, 2);
  const Group& g = *z4->alphabet;
  for (std::size_t i = 0; i < xs.size(); i += 7)
    for (std::size_t j = 0; j < xs.size(); j += 11) {
      auto xy = apply_op(g, xs[i], xs[j]);
      CHECK(sums_match(xs[i], xs[j], xy, -8, 8, 4));
      CHECK(contains(*z4, xy));
    }
}
