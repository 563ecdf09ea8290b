#include <doctest.h>

#include <set>

#include "common.hpp"
#include "shiftforge/sampler.hpp"
#include "shiftforge/shift_space.hpp"

using namespace shiftforge;
using testutil::e1;
using testutil::e2;

namespace {

bool even(const Element& a) { return a[0] % 2 == 0; }
bool same_parity(const Element& a, const Element& b) { return even(a) == even(b); }

std::vector<Sequence> periodic_words(const GroupPtr& g, std::size_t max_period) {
  std::vector<Sequence> out;
  std::vector<Element> letters = g->prefix(*g->order());
  for (std::size_t p = 1; p <= max_period; ++p) {
    std::vector<std::size_t> idx(p, 0);
    while (true) {
      Word w;
      for (auto i : idx) w.push_back(letters[i]);
      out.push_back(Sequence::periodic(w, {}, w, 0));
      std::size_t k = 0;
      while (k < p && ++idx[k] == letters.size()) idx[k++] = 0;
      if (k == p) break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("membership") {
  auto full = make_full_shift(make_integers(), Axis::TwoSided);
  CHECK(contains(*full, Sequence::periodic({e1(5), e1(-9)}, {e1(1)}, {e1(100)}, 3)));
  CHECK(contains(*full, Sequence::empty(Axis::TwoSided)));

  auto par = testutil::fixture("parity.json").shift;
  Word w{e1(1), e1(2), e1(3), e1(4)};
  CHECK(contains(*par, Sequence::periodic(w, {}, w, 0)));
  Word bad{e1(1), e1(2), e1(2)};
  CHECK_FALSE(contains(*par, Sequence::periodic(bad, {}, bad, 0)));
  CHECK_FALSE(in_language(*par, bad));
  CHECK(in_language(*par, {e1(1), e1(2), e1(3)}));
}

TEST_CASE("follower sets") {
  auto par = testutil::fixture("parity.json").shift;
  for (long long a : {0, 1, -3, 8}) {
    auto f = follower_set(*par, {e1(a)}, 1);
    CHECK(f.infinite());
    for (long long b = -6; b <= 6; ++b) CHECK(f.contains({e1(b)}));
  }

  auto z2 = testutil::fixture("z2_second.json").shift;
  auto f = follower_set(*z2, {e2(7, 5), e2(1, 5)}, 2);
  for (long long x = -3; x <= 3; ++x)
    for (long long y = -3; y <= 3; ++y) {
      CHECK(f.contains({e2(x, 5), e2(y, 5)}));
      CHECK_FALSE(f.contains({e2(x, 5), e2(y, 4)}));
      CHECK_FALSE(f.contains({e2(x, 6), e2(y, 5)}));
    }

  auto pf = testutil::fixture("prufer_fractal.json").shift;
  auto fp = follower_set(*pf, {e2(0, 1)}, 1);
  REQUIRE(fp.size() == std::optional<std::size_t>(2));
  CHECK(fp.contains({e2(0, 1)}));
  CHECK(fp.contains({e2(1, 1)}));
  CHECK_FALSE(fp.contains({e2(1, 2)}));
}

TEST_CASE("predecessor sets") {
  auto pf = testutil::fixture("prufer_fractal.json").shift;
  auto g = pf->alphabet;
  // Oracle: b = n/2^i precedes 0 iff n/2^(i+1) is 0 or 1/2 mod 1, searched at level <= 8.
  std::set<Element> want;
  for (long long i = 0; i <= 8; ++i)
    for (long long n = 0; n < (1LL << i); ++n) {
      if (i > 0 && n % 2 == 0) continue;
      long long den = 1LL << (i + 1);
      if (n % den == 0 || 2 * n % den == 0) want.insert(prufer_make(n, i == 0 ? 1 : i));
    }
  auto pb = bounded_predecessors(*pf, {g->identity()}, 1, 256);
  std::set<Element> got;
  for (const auto& w : pb.elements) got.insert(w.at(0));
  CHECK(got.size() == 1);
  CHECK(got.count(g->identity()) == 1);
  CHECK(got == want);

  auto full = make_full_shift(make_cyclic(3), Axis::TwoSided);
  auto pfull = predecessor_set(*full, {e1(1)}, 1);
  for (long long b = 0; b < 3; ++b) CHECK(pfull.contains({e1(b)}));

  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto p0 = predecessor_set(*z4, {e1(0)}, 1);
  for (long long b = 0; b < 4; ++b) CHECK(p0.contains({e1(b)}) == (b % 2 == 0));
}

TEST_CASE("language") {
  auto full = make_full_shift(make_cyclic(2), Axis::TwoSided);
  auto l = language(*full, 2, 16);
  CHECK(l.complete);
  CHECK(l.words.size() == 4);

  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto l4 = language(*z4, 2, 16);
  CHECK(l4.complete);
  std::set<Word> want;
  for (long long a = 0; a < 4; ++a)
    for (long long b = 0; b < 4; ++b)
      if ((b - a + 4) % 2 == 0) want.insert({e1(a), e1(b)});
  CHECK(std::set<Word>(l4.words.begin(), l4.words.end()) == want);
  CHECK(want.size() == 8);

  auto par = testutil::fixture("parity.json").shift;
  auto letters = par->alphabet->prefix(6);
  std::set<Word> pw;
  for (const auto& a : letters)
    for (const auto& b : letters)
      for (const auto& c : letters)
        if (same_parity(a, c)) pw.insert({a, b, c});
  auto l3 = language(*par, 3, 6);
  CHECK(std::set<Word>(l3.words.begin(), l3.words.end()) == pw);
  CHECK(pw.size() == 108);
}

TEST_CASE("classification") {
  auto pf = classify(*testutil::fixture("prufer_fractal.json").shift);
  CHECK(pf.row_finite);
  CHECK(pf.m_step == 1);
  CHECK(pf.is_edge_shift);

  auto z2 = classify(*testutil::fixture("z2_second.json").shift);
  CHECK(z2.m_step == 1);
  CHECK_FALSE(z2.is_sft);

  auto fz = classify(*testutil::fixture("full_z.json").shift);
  CHECK_FALSE(fz.row_finite);
  CHECK(fz.m_step == 0);

  auto par = classify(*testutil::fixture("parity.json").shift);
  CHECK(par.m_step == 2);
  CHECK(par.m_step_stabilized);
}

TEST_CASE("product shifts") {
  auto z2 = make_cyclic(2);
  auto prod = product_shift(make_full_shift(z2, Axis::TwoSided), make_full_shift(z2, Axis::TwoSided));
  auto big = make_full_shift(prod->alphabet, Axis::TwoSided);
  for (const auto& x : periodic_words(prod->alphabet, 2)) CHECK(contains(*prod, x) == contains(*big, x));

  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto unit = product_shift(z4, make_full_shift(make_cyclic(1), Axis::TwoSided));
  for (const auto& x : periodic_words(make_cyclic(4), 3)) {
    auto glued = product_glue(x, Sequence::constant(Axis::TwoSided, e1(0)));
    CHECK(contains(*unit, glued) == contains(*z4, x));
  }

  auto a = Sequence::periodic({e1(0), e1(2)}, {}, {e1(0), e1(2)}, 0);
  auto b = Sequence::periodic({e1(1), e1(0)}, {}, {e1(1), e1(0)}, 0);
  auto zz = product_shift(z4, make_full_shift(z2, Axis::TwoSided));
  REQUIRE(contains(*z4, a));
  CHECK(contains(*zz, product_glue(a, b)));
}

TEST_CASE("higher block presentation") {
  auto par = testutil::fixture("parity.json").shift;
  auto hb = higher_block(par, 2);
  auto letters = par->alphabet->prefix(5);
  for (const auto& a : letters)
    for (const auto& b : letters)
      for (const auto& c : letters) {
        CHECK(transition_allowed(*hb.shift, Element::concat(a, b), Element::concat(b, c)) == same_parity(a, c));
        if (b != c) CHECK_FALSE(transition_allowed(*hb.shift, Element::concat(a, b), Element::concat(c, c)));
      }
  for (const auto& x : sample_sequences(*par, 64, 7)) {
    auto y = hb.forward(x);
    CHECK(contains(*hb.shift, y));
    CHECK(hb.inverse(y) == x);
  }

  auto z4 = testutil::fixture("z4_coset.json").shift;
  auto h4 = higher_block(z4, 2);
  for (long long a = 0; a < 4; ++a)
    for (long long b = 0; b < 4; ++b)
      for (long long c = 0; c < 4; ++c) {
        if ((b - a + 4) % 2) continue;
        bool want = (c - b + 4) % 2 == 0;
        CHECK(transition_allowed(*h4.shift, e2(a, b), e2(b, c)) == want);
      }

  auto same = higher_block(z4, 1);
  for (const auto& x : enumerate_members(*z4, 2, 2)) CHECK(same.forward(x) == x);
}

TEST_CASE("enumerated members agree with membership") {
  for (const char* f : {"z4_coset.json", "full_z2.json", "identity_z2.json", "broken_closure.json",
                        "product_z2_z2.json", "periodic_points.json"}) {
    auto p = testutil::fixture(f).shift;
    const std::size_t cap = *p->alphabet->order() > 2 ? 2 : 3;
    auto xs = enumerate_members(*p, cap, cap);
    CHECK(!xs.empty());
    std::size_t bad = 0;
    for (const auto& x : xs) bad += contains(*p, x) ? 0 : 1;
    CHECK_MESSAGE(bad == 0, f);
  }
  // Oracle for the full shift over Z_2: every (left period, right period) pair with periods <= 2
  // and no transient, compared up to shifting, plus the empty sequence.
  auto key = [](const Sequence& x) {
    Sequence best = x;
    for (Index k = -4; k <= 4; ++k) best = std::min(best, shift_by(x, k));
    return best;
  };
  std::set<Sequence> want{Sequence::empty(Axis::TwoSided)};
  std::vector<Word> periods{{e1(0)}, {e1(1)}, {e1(0), e1(1)}, {e1(1), e1(0)}};
  for (const auto& l : periods)
    for (const auto& r : periods) want.insert(key(Sequence::periodic(l, {}, r, 0)));
  std::set<Sequence> got;
  for (const auto& x : enumerate_members(*testutil::fixture("full_z2.json").shift, 0, 2)) got.insert(key(x));
  CHECK(got == want);
}

TEST_CASE("sampler determinism") {
  auto p = testutil::fixture("parity.json").shift;
  auto a = sample_sequences(*p, 20, 11);
  auto b = sample_sequences(*p, 20, 11);
  CHECK(a == b);
  for (const auto& x : a) CHECK(contains(*p, x));
}
