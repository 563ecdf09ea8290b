#include "shiftforge/isg_embedding.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "shiftforge/block_ops.hpp"

namespace shiftforge {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

json pair_json(const AbstractInverseMonoid& s, std::size_t a, std::size_t b) {
  return json::array({s.names[a], s.names[b]});
}

std::vector<bool> left_ideal(const AbstractInverseMonoid& s, std::size_t x) {
  std::vector<bool> out(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) out[s.mul(a, x)] = true;
  return out;
}

std::vector<bool> right_ideal(const AbstractInverseMonoid& s, std::size_t x) {
  std::vector<bool> out(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) out[s.mul(x, a)] = true;
  return out;
}

std::size_t resolve(const AbstractInverseMonoid& s, const json& j) {
  if (j.is_number_unsigned()) {
    auto i = j.get<std::size_t>();
    if (i >= s.size()) throw Error(Errc::ParseError, "monoid element index " + std::to_string(i) + " out of range");
    return i;
  }
  if (j.is_string()) return s.index_of(j.get<std::string>());
  throw Error(Errc::ParseError, "monoid element must be a name or index: " + j.dump());
}

}  // namespace

std::optional<std::size_t> AbstractInverseMonoid::star(std::size_t a) const {
  std::optional<std::size_t> out;
  for (std::size_t b = 0; b < size(); ++b)
    if (mul(mul(a, b), a) == a && mul(mul(b, a), b) == b) {
      if (out) return std::nullopt;
      out = b;
    }
  return out;
}

std::size_t AbstractInverseMonoid::index_of(const std::string& n) const {
  auto it = std::find(names.begin(), names.end(), n);
  if (it == names.end()) throw Error(Errc::ParseError, "unknown monoid element " + n);
  return static_cast<std::size_t>(it - names.begin());
}

AbstractInverseMonoid truncated_sequence_monoid(const GroupPtr& g, std::size_t max_length, std::string name) {
  if (!g->is_finite()) throw Error(Errc::Unsupported, "truncated monoid needs a finite group");
  const auto letters = g->prefix(*g->order());
  AbstractInverseMonoid s;
  s.name = std::move(name);
  std::vector<Word> words{Word{}};
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::vector<Word> next;
    for (const auto& w : words)
      if (w.size() == len - 1)
        for (const auto& a : letters) {
          Word v = w;
          v.push_back(a);
          next.push_back(std::move(v));
        }
    words.insert(words.end(), next.begin(), next.end());
  }
  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < words.size(); ++i) {
    index[words[i]] = i;
    std::string n = "(";
    for (std::size_t k = 0; k < words[i].size(); ++k) n += (k ? "," : "") + g->label(words[i][k]);
    s.names.push_back(words[i].empty() ? "0" : n + ")");
  }
  s.zero = 0;
  s.table.assign(words.size(), std::vector<std::size_t>(words.size()));
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = 0; j < words.size(); ++j) {
      const std::size_t len = std::min(words[i].size(), words[j].size());
      Word w;
      for (std::size_t k = 0; k < len; ++k) w.push_back(g->multiply(words[i][k], words[j][k]));
      s.table[i][j] = index.at(w);
    }
  for (const auto& w : words) s.t.push_back(w.empty() ? 0 : index.at(Word(w.begin() + 1, w.end())));
  s.descriptor = {{"kind", "truncated_sequence"}, {"group", g->describe()}, {"max_length", max_length}};
  return s;
}

AbstractInverseMonoid monoid_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::ParseError, "monoid needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  const std::string name = j.value("name", std::string("monoid"));
  if (kind == "truncated_sequence") {
    auto s = truncated_sequence_monoid(group_from_json(j.at("group")), j.at("max_length").get<std::size_t>(), name);
    return s;
  }
  if (kind != "table") throw Error(Errc::ParseError, "unknown monoid kind " + kind);
  AbstractInverseMonoid s;
  s.name = name;
  s.names = j.at("elements").get<std::vector<std::string>>();
  if (s.names.empty()) throw Error(Errc::ParseError, "monoid has no elements");
  const auto& rows = j.at("table");
  if (!rows.is_array() || rows.size() != s.size()) throw Error(Errc::ParseError, "table must have one row per element");
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != s.size()) throw Error(Errc::ParseError, "table rows must be square");
    std::vector<std::size_t> r;
    for (const auto& e : row) r.push_back(resolve(s, e));
    s.table.push_back(std::move(r));
  }
  s.zero = resolve(s, j.at("zero"));
  const auto& t = j.at("T");
  if (t.is_array()) {
    if (t.size() != s.size()) throw Error(Errc::ParseError, "T needs one image per element");
    for (const auto& e : t) s.t.push_back(resolve(s, e));
  } else if (t.is_object()) {
    s.t.assign(s.size(), npos);
    for (auto it = t.begin(); it != t.end(); ++it) s.t[s.index_of(it.key())] = resolve(s, it.value());
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.t[i] == npos) throw Error(Errc::ParseError, "T has no image for " + s.names[i]);
  } else {
    throw Error(Errc::ParseError, "T must be an array or an object");
  }
  if (j.contains("idempotents"))
    for (const auto& e : j.at("idempotents")) s.declared_chain.push_back(resolve(s, e));
  s.descriptor = j;
  return s;
}

const char* status_name(HypothesisCheck::Status s) {
  switch (s) {
    case HypothesisCheck::Status::Pass: return "pass";
    case HypothesisCheck::Status::Fail: return "fail";
    case HypothesisCheck::Status::Skipped: return "skipped";
  }
  return "?";
}

bool ChainReport::all_pass() const {
  if (!inverse_monoid) return false;
  return std::all_of(hypotheses.begin(), hypotheses.end(),
                     [](const HypothesisCheck& h) { return h.status == HypothesisCheck::Status::Pass; });
}

json ChainReport::to_json(const AbstractInverseMonoid& s) const {
  json hs = json::array();
  for (const auto& h : hypotheses) {
    json e{{"number", h.number}, {"statement", h.statement}, {"status", status_name(h.status)}};
    if (!h.note.empty()) e["note"] = h.note;
    if (!h.counterexample.is_null()) e["counterexample"] = h.counterexample;
    hs.push_back(e);
  }
  json ch = json::array();
  for (auto c : chain) ch.push_back(s.names[c]);
  json j{{"monoid", s.name},
         {"elements", s.size()},
         {"inverse_monoid", inverse_monoid},
         {"chain", ch},
         {"t_surjective", t_surjective},
         {"hypotheses", hs},
         {"all_pass", all_pass()},
         {"exhaustive", true}};
  if (!inverse_failure.empty()) j["inverse_failure"] = inverse_failure;
  return j;
}

ChainReport verify_chain_hypotheses(const AbstractInverseMonoid& s) {
  ChainReport r;
  const std::size_t n = s.size();
  const std::array<const char*, 5> statements{
      "no zero divisors", "idempotents form a chain e_0 <= e_1 <= ...",
      "T is a homomorphism with T(e_i) = e_(i-1)", "e_1 s = s e_1 for every s",
      "T(s) idempotent and e_1 s = e_1 imply s idempotent"};
  for (int i = 0; i < 5; ++i) {
    r.hypotheses[static_cast<std::size_t>(i)].number = i + 1;
    r.hypotheses[static_cast<std::size_t>(i)].statement = statements[static_cast<std::size_t>(i)];
  }
  auto fail_inverse = [&](std::string why) {
    if (r.inverse_failure.empty()) r.inverse_failure = std::move(why);
  };

  // Inverse monoid with zero.
  for (std::size_t a = 0; a < n && r.inverse_failure.empty(); ++a)
    for (std::size_t b = 0; b < n && r.inverse_failure.empty(); ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (s.mul(s.mul(a, b), c) != s.mul(a, s.mul(b, c))) {
          fail_inverse("not associative at (" + s.names[a] + ", " + s.names[b] + ", " + s.names[c] + ")");
          break;
        }
  for (std::size_t e = 0; e < n && !r.identity; ++e) {
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) ok = s.mul(e, a) == a && s.mul(a, e) == a;
    if (ok) r.identity = e;
  }
  if (!r.identity) fail_inverse("no identity");
  for (std::size_t a = 0; a < n; ++a)
    if (s.mul(s.zero, a) != s.zero || s.mul(a, s.zero) != s.zero) {
      fail_inverse(s.names[s.zero] + " is not a zero");
      break;
    }
  for (std::size_t a = 0; a < n; ++a)
    if (!s.star(a)) {
      fail_inverse(s.names[a] + " has no unique inverse");
      break;
    }
  r.inverse_monoid = r.inverse_failure.empty();

  auto& h1 = r.hypotheses[0];
  h1.status = HypothesisCheck::Status::Pass;
  for (std::size_t a = 0; a < n && h1.status == HypothesisCheck::Status::Pass; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != s.zero && b != s.zero && s.mul(a, b) == s.zero) {
        h1.status = HypothesisCheck::Status::Fail;
        h1.counterexample = pair_json(s, a, b);
        break;
      }

  std::vector<std::size_t> idem;
  for (std::size_t a = 0; a < n; ++a)
    if (s.idempotent(a)) idem.push_back(a);
  auto& h2 = r.hypotheses[1];
  h2.status = HypothesisCheck::Status::Pass;
  auto leq = [&](std::size_t e, std::size_t f) { return s.mul(e, f) == e && s.mul(f, e) == e; };
  for (std::size_t i = 0; i < idem.size() && h2.status == HypothesisCheck::Status::Pass; ++i)
    for (std::size_t k = i + 1; k < idem.size(); ++k)
      if (!leq(idem[i], idem[k]) && !leq(idem[k], idem[i])) {
        h2.status = HypothesisCheck::Status::Fail;
        h2.counterexample = pair_json(s, idem[i], idem[k]);
        h2.note = "incomparable idempotents";
        break;
      }
  if (h2.status == HypothesisCheck::Status::Pass) {
    r.chain = idem;
    std::sort(r.chain.begin(), r.chain.end(), [&](std::size_t e, std::size_t f) { return e != f && leq(e, f); });
    if (r.chain.front() != s.zero) {
      h2.status = HypothesisCheck::Status::Fail;
      h2.note = "the least idempotent is not the zero";
    } else if (r.chain.size() < 2) {
      h2.status = HypothesisCheck::Status::Fail;
      h2.note = "no idempotent e_1 above the zero";
    } else if (!s.declared_chain.empty() && s.declared_chain != r.chain) {
      h2.status = HypothesisCheck::Status::Fail;
      h2.note = "declared idempotent list differs from the computed chain";
    }
    if (h2.status != HypothesisCheck::Status::Pass) r.chain.clear();
  }

  std::set<std::size_t> image(s.t.begin(), s.t.end());
  r.t_surjective = image.size() == n;
  if (r.chain.empty()) {
    for (std::size_t i = 2; i < 5; ++i) r.hypotheses[i].note = "needs the idempotent chain";
    return r;
  }
  const std::size_t e1 = r.chain[1];

  auto& h3 = r.hypotheses[2];
  h3.status = HypothesisCheck::Status::Pass;
  for (std::size_t a = 0; a < n && h3.status == HypothesisCheck::Status::Pass; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (s.t[s.mul(a, b)] != s.mul(s.t[a], s.t[b])) {
        h3.status = HypothesisCheck::Status::Fail;
        h3.counterexample = pair_json(s, a, b);
        h3.note = "T is not multiplicative";
        break;
      }
  if (h3.status == HypothesisCheck::Status::Pass && s.t[s.zero] != s.zero) {
    h3.status = HypothesisCheck::Status::Fail;
    h3.note = "T does not fix the zero";
  }
  for (std::size_t i = 1; i < r.chain.size() && h3.status == HypothesisCheck::Status::Pass; ++i)
    if (s.t[r.chain[i]] != r.chain[i - 1]) {
      h3.status = HypothesisCheck::Status::Fail;
      h3.counterexample = json::array({s.names[r.chain[i]], s.names[s.t[r.chain[i]]]});
      h3.note = "T(e_" + std::to_string(i) + ") is not e_" + std::to_string(i - 1);
    }
  if (h3.status == HypothesisCheck::Status::Pass && !r.t_surjective)
    h3.note = "T is not onto; accepted because the chain e_0..e_" + std::to_string(r.chain.size() - 1) + " is finite";

  auto& h4 = r.hypotheses[3];
  h4.status = HypothesisCheck::Status::Pass;
  for (std::size_t a = 0; a < n; ++a)
    if (s.mul(e1, a) != s.mul(a, e1)) {
      h4.status = HypothesisCheck::Status::Fail;
      h4.counterexample = s.names[a];
      break;
    }

  auto& h5 = r.hypotheses[4];
  h5.status = HypothesisCheck::Status::Pass;
  for (std::size_t a = 0; a < n; ++a)
    if (s.idempotent(s.t[a]) && s.mul(e1, a) == e1 && !s.idempotent(a)) {
      h5.status = HypothesisCheck::Status::Fail;
      h5.counterexample = s.names[a];
      break;
    }
  return r;
}

ChainGroup chain_group(const AbstractInverseMonoid& s) {
  auto rep = verify_chain_hypotheses(s);
  if (!rep.all_pass()) throw Error(Errc::HypothesisViolated, "monoid " + s.name + " fails the chain hypotheses");
  ChainGroup cg;
  cg.chain = rep.chain;
  cg.e1 = rep.chain[1];
  std::set<std::size_t> seen;
  cg.members.push_back(cg.e1);
  seen.insert(cg.e1);
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (a == s.zero) continue;
    std::size_t m = s.mul(cg.e1, a);
    if (seen.insert(m).second) cg.members.push_back(m);
  }
  cg.to_group.assign(s.size(), npos);
  for (std::size_t i = 0; i < cg.members.size(); ++i) cg.to_group[cg.members[i]] = i;
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> table(cg.members.size(), std::vector<std::size_t>(cg.members.size()));
  for (std::size_t i = 0; i < cg.members.size(); ++i) {
    names.push_back(s.names[cg.members[i]]);
    for (std::size_t k = 0; k < cg.members.size(); ++k) {
      std::size_t m = s.mul(cg.members[i], cg.members[k]);
      if (cg.to_group[m] == npos)
        throw Error(Errc::HypothesisViolated, "e_1 S is not closed at " + pair_json(s, cg.members[i], cg.members[k]).dump());
      table[i][k] = cg.to_group[m];
    }
  }
  try {
    cg.group = make_table_group("e1" + s.name, std::move(names), std::move(table));
  } catch (const Error& e) {
    throw Error(Errc::HypothesisViolated, std::string("e_1 S is not a group: ") + e.what());
  }
  return cg;
}

Sequence embed_theta(const AbstractInverseMonoid& s, const ChainGroup& cg, std::size_t x) {
  if (x == s.zero) return Sequence::empty(Axis::OneSided);
  Word letters;
  std::map<std::size_t, std::size_t> seen;
  std::size_t cur = x;
  while (cur != s.zero) {
    auto it = seen.find(cur);
    if (it != seen.end()) {
      Word head(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(it->second));
      Word period(letters.begin() + static_cast<std::ptrdiff_t>(it->second), letters.end());
      return Sequence::infinite(std::move(head), std::move(period));
    }
    seen[cur] = letters.size();
    letters.push_back(Element{cg.to_group[s.mul(cg.e1, cur)]});
    cur = s.t[cur];
  }
  return Sequence::finite(std::move(letters));
}

std::optional<std::size_t> theta_letters(const AbstractInverseMonoid& s, std::size_t x) {
  std::set<std::size_t> seen;
  std::size_t k = 0;
  for (std::size_t cur = x; cur != s.zero; cur = s.t[cur], ++k)
    if (!seen.insert(cur).second) return std::nullopt;
  return k;
}

json EmbeddingCheck::to_json() const {
  return {{"elements", elements},
          {"pairs", pairs},
          {"group_order", group_order},
          {"injective", injective},
          {"multiplicative", multiplicative},
          {"shift", shift},
          {"lr_law", lr_law},
          {"star_law", star_law},
          {"class_groups", class_groups},
          {"image_shift_invariant", image_shift_invariant},
          {"image_is_shift_space", image_is_shift_space},
          {"image_note", image_note},
          {"exhaustive", true},
          {"witnesses", witnesses}};
}

EmbeddingCheck verify_embedding(const AbstractInverseMonoid& s) {
  auto cg = chain_group(s);
  const Group& g = *cg.group;
  const std::size_t n = s.size();
  EmbeddingCheck c;
  c.elements = n;
  c.pairs = n * n;
  c.group_order = cg.members.size();
  auto note = [&](json w) {
    if (c.witnesses.size() < 8) c.witnesses.push_back(std::move(w));
  };
  std::vector<Sequence> th;
  for (std::size_t a = 0; a < n; ++a) th.push_back(embed_theta(s, cg, a));

  std::map<Sequence, std::size_t> first;
  for (std::size_t a = 0; a < n; ++a) {
    auto [it, fresh] = first.emplace(th[a], a);
    if (!fresh) {
      ++c.injective;
      note({{"injective", pair_json(s, it->second, a)}});
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (th[s.mul(a, b)] != apply_op(g, th[a], th[b])) {
        ++c.multiplicative;
        note({{"multiplicative", pair_json(s, a, b)}});
      }
  for (std::size_t a = 0; a < n; ++a)
    if (shift(th[a]) != th[s.t[a]]) {
      ++c.shift;
      note({{"shift", s.names[a]}});
    }

  // Green's relations straight from principal ideals.
  std::vector<std::vector<bool>> li, ri;
  for (std::size_t a = 0; a < n; ++a) {
    li.push_back(left_ideal(s, a));
    ri.push_back(right_ideal(s, a));
  }
  std::vector<std::optional<std::size_t>> len;
  for (std::size_t a = 0; a < n; ++a) len.push_back(theta_letters(s, a));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t a = 0; a < n; ++a) {
      const bool same_len = len[a] == len[t];
      if ((li[a] == li[t]) != same_len || (ri[a] == ri[t]) != same_len) {
        ++c.lr_law;
        note({{"lr_law", pair_json(s, t, a)}});
      }
    }
  // x x* = x* x = e_l with l the number of letters of theta(x).
  for (std::size_t a = 0; a < n; ++a) {
    auto st = s.star(a);
    const bool finite_len = len[a].has_value() && *len[a] < cg.chain.size();
    if (!st || !finite_len || s.mul(a, *st) != cg.chain[*len[a]] || s.mul(*st, a) != cg.chain[*len[a]]) {
      ++c.star_law;
      note({{"star_law", s.names[a]}});
    }
  }
  // Each class of equal length is a group with identity e_l.
  std::map<std::optional<std::size_t>, std::vector<std::size_t>> classes;
  for (std::size_t a = 0; a < n; ++a) classes[len[a]].push_back(a);
  for (const auto& [l, members] : classes) {
    std::set<std::size_t> in(members.begin(), members.end());
    bool ok = l.has_value() && *l < cg.chain.size() && in.count(cg.chain[*l]);
    for (std::size_t a : members)
      for (std::size_t b : members) ok = ok && in.count(s.mul(a, b));
    if (!ok) {
      ++c.class_groups;
      note({{"class_groups", l ? json(*l) : json("infinite")}});
    }
  }

  std::set<Sequence> img(th.begin(), th.end());
  c.image_shift_invariant = std::all_of(th.begin(), th.end(), [&](const Sequence& x) { return img.count(shift(x)) > 0; });
  const bool has_infinite = std::any_of(th.begin(), th.end(), [](const Sequence& x) { return !x.is_finite(); });
  c.image_is_shift_space = false;
  if (!has_infinite) {
    c.image_note = "image has only finite sequences, so it is shift invariant but not a shift space";
  } else {
    c.image_note = "image contains infinite sequences; shift-space axioms not decided for abstract images";
  }
  return c;
}

}  // namespace shiftforge
