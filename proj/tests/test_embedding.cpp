#include <doctest.h>

#include <fstream>

#include "common.hpp"
#include "shiftforge/isg_embedding.hpp"

using namespace shiftforge;

namespace {

using Digits = std::vector<int>;

// Independent model of the truncated monoid: digit words, entrywise sum mod n, cut to the shorter word.
Digits trunc_mul(const Digits& a, const Digits& b, int n) {
  Digits out;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) out.push_back((a[i] + b[i]) % n);
  return out;
}

Digits parse_name(const std::string& s) {
  Digits d;
  if (s == "0") return d;
  for (char c : s)
    if (c >= '0' && c <= '9') d.push_back(c - '0');
  return d;
}

AbstractInverseMonoid monoid_fixture(const std::string& f) {
  std::ifstream in(testutil::fixture_path(f));
  return monoid_from_json(json::parse(in));
}

Digits theta_digits(const AbstractInverseMonoid& s, const ChainGroup& cg, std::size_t x) {
  Sequence t = embed_theta(s, cg, x);
  Digits d;
  if (t.is_empty()) return d;
  for (Index i = 0; i <= t.length(); ++i) {
    std::string label = cg.group->label(*t.at(i));
    Digits one = parse_name(label);
    REQUIRE(one.size() == 1);
    d.push_back(one[0]);
  }
  return d;
}

}  // namespace

TEST_CASE("truncated monoid matches the digit model") {
  for (int n : {2, 3}) {
    auto s = truncated_sequence_monoid(make_cyclic(static_cast<std::size_t>(n)), 3);
    std::size_t expect = 0;
    for (int len = 0, p = 1; len <= 3; ++len, p *= n) expect += static_cast<std::size_t>(p);
    CHECK(s.size() == expect);
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = 0; b < s.size(); ++b)
        CHECK(parse_name(s.names[s.mul(a, b)]) == trunc_mul(parse_name(s.names[a]), parse_name(s.names[b]), n));
      Digits d = parse_name(s.names[a]);
      Digits dropped = d.empty() ? d : Digits(d.begin() + 1, d.end());
      CHECK(parse_name(s.names[s.t[a]]) == dropped);
    }
  }
}

TEST_CASE("chain hypotheses") {
  auto z2 = verify_chain_hypotheses(monoid_fixture("monoid_truncated_z2.json"));
  CHECK(z2.all_pass());
  CHECK(z2.chain.size() == 4);

  auto inc = verify_chain_hypotheses(monoid_fixture("monoid_incomparable.json"));
  CHECK_FALSE(inc.all_pass());
  CHECK(inc.hypotheses[0].status == HypothesisCheck::Status::Pass);
  CHECK(inc.hypotheses[1].status == HypothesisCheck::Status::Fail);

  auto zd = verify_chain_hypotheses(monoid_fixture("monoid_zero_divisors.json"));
  CHECK(zd.hypotheses[0].status == HypothesisCheck::Status::Fail);
  CHECK_FALSE(zd.all_pass());
}

TEST_CASE("the group e_1 S") {
  auto s2 = monoid_fixture("monoid_truncated_z2.json");
  CHECK(chain_group(s2).group->order() == std::optional<std::size_t>(2));
  auto s3 = monoid_fixture("monoid_truncated_z3.json");
  CHECK(chain_group(s3).group->order() == std::optional<std::size_t>(3));
  auto g0 = monoid_fixture("monoid_group_with_zero.json");
  auto cg = chain_group(g0);
  CHECK(cg.group->order() == std::optional<std::size_t>(3));
  CHECK(cg.members.size() == 3);

  try {
    chain_group(monoid_fixture("monoid_incomparable.json"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::HypothesisViolated);
  }
}

TEST_CASE("theta on the truncated monoid") {
  for (const char* f : {"monoid_truncated_z2.json", "monoid_truncated_z3.json"}) {
    auto s = monoid_fixture(f);
    auto cg = chain_group(s);
    CHECK(embed_theta(s, cg, s.zero).is_empty());
    // theta reads the word back letter by letter.
    for (std::size_t x = 0; x < s.size(); ++x) CHECK(theta_digits(s, cg, x) == parse_name(s.names[x]));
    auto ek = cg.chain.back();
    CHECK(theta_digits(s, cg, ek) == Digits(3, 0));
    CHECK(theta_letters(s, ek) == std::optional<std::size_t>(3));
  }
  auto s = monoid_fixture("monoid_truncated_z2.json");
  auto cg = chain_group(s);
  CHECK(theta_digits(s, cg, s.index_of("(1,0,1)")) == Digits{1, 0, 1});
}

TEST_CASE("embedding checks") {
  for (const char* f : {"monoid_truncated_z2.json", "monoid_truncated_z3.json", "monoid_group_with_zero.json"}) {
    auto c = verify_embedding(monoid_fixture(f));
    CHECK_MESSAGE(c.violations() == 0, f);
    CHECK(c.pairs == c.elements * c.elements);
    CHECK(c.image_shift_invariant);
  }
}

TEST_CASE("L and R classes follow theta length") {
  auto s = monoid_fixture("monoid_truncated_z3.json");
  // Principal ideals computed from the table: s L t iff S s = S t, s R t iff s S = t S.
  auto left = [&](std::size_t a) {
    std::set<std::size_t> out;
    for (std::size_t u = 0; u < s.size(); ++u) out.insert(s.mul(u, a));
    return out;
  };
  auto right = [&](std::size_t a) {
    std::set<std::size_t> out;
    for (std::size_t u = 0; u < s.size(); ++u) out.insert(s.mul(a, u));
    return out;
  };
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b) {
      const bool same_len = parse_name(s.names[a]).size() == parse_name(s.names[b]).size();
      CHECK((left(a) == left(b)) == same_len);
      CHECK((right(a) == right(b)) == same_len);
    }
}

TEST_CASE("monoid json errors") {
  CHECK_THROWS_AS(monoid_from_json(json::parse(R"({"kind":"table","elements":["0"],"table":[["x"]]})")), Error);
  CHECK_THROWS_AS(monoid_from_json(json::parse(R"({"kind":"mystery"})")), Error);
}
