#include "shiftforge/block_ops.hpp"

#include <algorithm>

#include "shiftforge/sampler.hpp"

namespace shiftforge {

std::vector<Element> AlphabetOp::prefix(std::size_t n) const {
  if (order) n = std::min(n, *order);
  std::vector<Element> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(at(i));
  return out;
}

AlphabetOp group_op(GroupPtr g) {
  AlphabetOp op;
  op.name = g->kind();
  op.mul = [g](const Element& a, const Element& b) -> Letter { return g->multiply(a, b); };
  op.at = [g](std::size_t k) { return g->at(k); };
  op.order = g->order();
  op.label = [g](const Element& a) { return g->label(a); };
  return op;
}

AlphabetOp union_of_cyclic_groups(std::vector<std::size_t> sizes, bool repeat) {
  if (sizes.empty() || std::count(sizes.begin(), sizes.end(), 0)) throw Error(Errc::ValidationError, "group sizes must be positive");
  AlphabetOp op;
  op.name = "union_of_cyclic";
  auto size_of = [sizes, repeat](const Integer& i) -> std::size_t {
    if (i < 0) return 0;
    if (!repeat && i >= Integer(sizes.size())) return 0;
    return sizes[to_size(i) % sizes.size()];
  };
  op.mul = [size_of](const Element& a, const Element& b) -> Letter {
    if (a[0] > b[0]) return a;
    if (a[0] < b[0]) return b;
    return Element{a[0], floor_mod(a[1] + b[1], Integer(size_of(a[0])))};
  };
  op.at = [sizes, repeat](std::size_t k) {
    std::size_t i = 0;
    while (true) {
      if (!repeat && i >= sizes.size()) throw Error(Errc::ValidationError, "letter index out of range");
      const std::size_t n = sizes[i % sizes.size()];
      if (k < n) return Element{Integer(i), Integer(k)};
      k -= n;
      ++i;
    }
  };
  if (!repeat) {
    std::size_t total = 0;
    for (auto s : sizes) total += s;
    op.order = total;
  }
  op.label = [](const Element& a) { return "G" + a[0].str() + ":" + a[1].str(); };
  return op;
}

Sequence apply_op(const Group& g, const Sequence& x, const Sequence& y) {
  return zip_letters(x, y, [&](const Element& a, const Element& b) { return g.multiply(a, b); });
}

Sequence apply_op(const AlphabetOp& op, const Sequence& x, const Sequence& y) {
  return zip_letters(x, y, [&](const Element& a, const Element& b) {
    Letter r = op.mul(a, b);
    if (!r) throw Error(Errc::ZeroDivisorDetected, op.label(a) + " * " + op.label(b) + " is empty");
    return *r;
  });
}

Sequence star(const Group& g, const Sequence& x) {
  return map_letters(x, [&](const Element& a) { return g.inverse(a); });
}

Sequence idempotent(const ShiftPresentation& p, Index n) {
  return identity_word_sequence(p.axis, p.alphabet->identity(), n);
}

// ---------------------------------------------------------------- closure

json ClosureReport::to_json(const Group& g) const {
  json j{{"closed", closed}, {"exact", exact}, {"pairs_checked", pairs_checked}, {"bound", bound}};
  if (witness) {
    auto word = [&](const Word& w) {
      json a = json::array();
      for (const auto& e : w) a.push_back(g.encode(e));
      return a;
    };
    j["witness"] = {word(witness->first), word(witness->second)};
  }
  return j;
}

ClosureReport verify_closure(const ShiftPresentation& p, std::size_t bound, Exec exec) {
  ClosureReport r;
  r.bound = bound;
  if (p.is_full() || p.is_periodic_points()) {
    r.exact = true;
    return r;
  }
  const Group& g = *p.alphabet;
  if (auto mc = p.markov()) {
    if (auto w = hom_witness(*mc->f, bound)) {
      r.closed = false;
      r.witness = {{w->first, mc->f->apply(w->first)}, {w->second, mc->f->apply(w->second)}};
      return r;
    }
  }
  // Shrink the letter bound until the window list stays small enough for all pairs.
  const std::size_t ws = window_size(p);
  std::size_t b = bound;
  Language lang = language(p, ws, b);
  while (lang.words.size() > 1024 && b > 2) {
    b = b * 3 / 4;
    lang = language(p, ws, b);
  }
  r.bound = b;
  r.exact = lang.complete;
  const auto& words = lang.words;
  auto per_row = run_indexed<std::optional<std::size_t>>(words.size(), exec, [&](std::size_t i) {
    for (std::size_t j = 0; j < words.size(); ++j)
      if (!in_language(p, multiply_words(g, words[i], words[j]))) return std::optional<std::size_t>(j);
    return std::optional<std::size_t>();
  });
  r.pairs_checked = words.size() * words.size();
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (per_row[i]) {
      r.closed = false;
      r.witness = {words[i], words[*per_row[i]]};
      break;
    }
  }
  return r;
}

InverseIdempotent inverse_and_idempotents(const ShiftPresentation& p, const Sequence& x) {
  Sequence s = star(*p.alphabet, x);
  return {s, apply_op(*p.alphabet, x, s)};
}

const char* idempotent_set_name(IdempotentSet s) {
  switch (s) {
    case IdempotentSet::Top: return "{e^inf}";
    case IdempotentSet::TopAndZero: return "{e^-inf, e^inf}";
    case IdempotentSet::FullChain: return "{e^n : n in S or +-inf}";
  }
  return "?";
}

json SemigroupClass::to_json() const {
  return {{"kind", is_group ? "group" : "inverse_monoid_with_zero"}, {"idempotents", idempotent_set_name(idempotents)}};
}

SemigroupClass classify_semigroup(const ShiftPresentation& p) {
  SemigroupClass c;
  c.is_group = p.axis == Axis::OneSided ? !letters_infinite(p) : space_finite(p);
  if (c.is_group) c.idempotents = IdempotentSet::Top;
  else c.idempotents = classify(p).row_finite ? IdempotentSet::TopAndZero : IdempotentSet::FullChain;
  return c;
}

// ------------------------------------------------------------- continuity

namespace {

bool non_constant(const Sequence& x) {
  if (x.is_finite()) return false;
  if (x.kind() == Sequence::Kind::Infinite)
    return x.right_period().size() > 1 || std::any_of(x.middle().begin(), x.middle().end(),
                                                       [&](const Element& e) { return e != x.right_period()[0]; });
  return x.left_period().size() > 1 || x.right_period().size() > 1 || !x.middle().empty() ||
         x.left_period() != x.right_period();
}

std::optional<json> shifted_pair_witness(const ShiftPresentation& p) {
  const Group& g = *p.alphabet;
  for (const auto& x : sample_sequences(p, 64, 1)) {
    if (!non_constant(x)) continue;
    Sequence z = product_glue(x, star(g, x));
    const Sequence top = idempotent(p, kPosInf);
    const std::size_t la = g.arity();
    for (Index n = 0; n < 8; ++n) {
      auto [u, v] = product_split(shift_by(z, n), la);
      if (apply_op(g, u, v) != top) return std::nullopt;
    }
    return json{{"kind", "shifted_pair"}, {"x", sequence_to_json(g, x)}, {"shifts_checked", 8}, {"image", "e^inf"}};
  }
  return std::nullopt;
}

// A window of a non-constant walk, for shifts whose eventually periodic part is too thin.
std::optional<json> walk_window_witness(const ShiftPresentation& p, std::size_t len) {
  const Group& g = *p.alphabet;
  Word w{g.identity()};
  bool moved = false;
  for (std::size_t s = 0; s < len; ++s) {
    FollowerResult f = follower_set(p, {w.back()}, 1);
    std::vector<Element> options;
    if (f.coset) {
      for (const auto& h : f.coset->subgroup->prefix(8)) options.push_back(f.coset->subgroup->parent()->multiply(f.coset->rep, h));
    } else {
      for (const auto& b : f.elements) options.push_back(b[0]);
    }
    std::sort(options.begin(), options.end(), [&](const Element& a, const Element& b) { return g.ordinal_less(a, b); });
    auto it = std::find_if(options.begin(), options.end(), [&](const Element& e) { return e != w.back(); });
    if (it == options.end() && options.empty()) return std::nullopt;
    w.push_back(it != options.end() ? *it : options.front());
    moved = moved || w.back() != w.front();
  }
  if (!moved || !in_language(p, w)) return std::nullopt;
  json win = json::array();
  for (const auto& e : w) win.push_back(g.encode(e));
  return json{{"kind", "walk_window"}, {"window", win}, {"image", "e^inf"},
              {"note", "admissible window of a non-constant sequence x; x * x^-1 is the identity letter at every index"}};
}

}  // namespace

ContinuityReport continuity_check(const ShiftPresentation& p, std::size_t bound) {
  ContinuityReport r;
  const Group& g = *p.alphabet;
  if (p.axis == Axis::OneSided) {
    r.continuous = !letters_infinite(p);
    if (r.continuous) {
      r.reason = "one-sided with finitely many letters";
      return r;
    }
    r.reason = "one-sided with infinitely many letters: the fiber over the identity is infinite";
    json pairs = json::array();
    for (const auto& b : p.alphabet->prefix(bound)) {
      if (!letter_in_alphabet(p, b)) continue;
      if (g.multiply(b, g.inverse(b)) != g.identity()) throw Error(Errc::ValidationError, "inverse failed");
      pairs.push_back({g.encode(b), g.encode(g.inverse(b))});
    }
    r.witness = {{"kind", "fiber"}, {"target", g.encode(g.identity())}, {"pairs", pairs}, {"bound", bound}};
    return r;
  }
  r.continuous = space_finite(p);
  if (r.continuous) {
    r.reason = "two-sided and finite";
    return r;
  }
  r.reason = "two-sided and infinite: sigma^n(x, x*) leaves every cylinder while its image stays e^inf";
  if (auto w = shifted_pair_witness(p)) r.witness = *w;
  else if (auto w2 = walk_window_witness(p, std::min<std::size_t>(bound, 8))) r.witness = *w2;
  else {
    json xs = json::array();
    for (const auto& a : p.alphabet->prefix(std::min<std::size_t>(bound, 8)))
      if (contains(p, Sequence::constant(p.axis, a))) xs.push_back(g.encode(a));
    r.witness = {{"kind", "constants"}, {"letters", xs}, {"image", "e^inf"}};
  }
  return r;
}

ContinuityReport continuity_check(const AlphabetOp& op, std::size_t bound, std::size_t probes) {
  ContinuityReport r;
  auto fiber = [&](const Element& a, std::size_t b) {
    auto letters = op.prefix(b);
    std::vector<std::pair<Element, Element>> out;
    for (const auto& x : letters)
      for (const auto& y : letters)
        if (auto z = op.mul(x, y); z && *z == a) out.emplace_back(x, y);
    return out;
  };
  const bool exact = op.order && bound >= *op.order;
  for (const auto& a : op.prefix(probes)) {
    auto small = fiber(a, bound);
    auto large = exact ? small : fiber(a, 2 * bound);
    if (small.size() != large.size()) {
      json pairs = json::array();
      for (std::size_t i = 0; i < large.size() && i < 8; ++i)
        pairs.push_back({op.label(large[i].first), op.label(large[i].second)});
      r.continuous = false;
      r.reason = "fiber over " + op.label(a) + " keeps growing";
      r.witness = {{"kind", "fiber"}, {"target", op.label(a)}, {"size_at_bound", small.size()},
                   {"size_at_twice_bound", large.size()}, {"pairs", pairs}, {"bound", bound}};
      return r;
    }
  }
  r.continuous = true;
  r.reason = exact ? "finite letter set" : "fibers stabilized between bound and twice bound";
  r.witness = {{"bound", bound}, {"probes", probes}, {"exact", exact}};
  return r;
}

AlphabetOp induce_alphabet_op(const std::function<Sequence(const Sequence&, const Sequence&)>& seq_op,
                              const AlphabetOp& letters, Axis axis) {
  auto op = letters;
  op.name = "induced(" + letters.name + ")";
  op.mul = [seq_op, axis, label = letters.label](const Element& a, const Element& b) -> Letter {
    Letter r = seq_op(Sequence::constant(axis, a), Sequence::constant(axis, b)).at(0);
    if (!r) throw Error(Errc::ZeroDivisorDetected, label(a) + " * " + label(b) + " is empty");
    return r;
  };
  for (const auto& a : letters.prefix(16))
    for (const auto& b : letters.prefix(16)) op.mul(a, b);
  return op;
}

// ------------------------------------------------------------ axiom suite

std::size_t AxiomReport::violations() const {
  return associativity + regularity + idempotents_commute + shift_homomorphism + green_classes + closure +
         prefix_agreement;
}

json AxiomReport::to_json() const {
  return {{"triples", triples},
          {"violations", violations()},
          {"associativity", associativity},
          {"regularity", regularity},
          {"idempotents_commute", idempotents_commute},
          {"shift_homomorphism", shift_homomorphism},
          {"green_classes", green_classes},
          {"closure", closure},
          {"prefix_agreement", prefix_agreement},
          {"witnesses", witnesses}};
}

namespace {

struct TripleOutcome {
  std::uint8_t failed = 0;  // bit per check, in AxiomReport field order
  std::string first;
};

TripleOutcome check_triple(const ShiftPresentation& p, const Sequence& x, const Sequence& y, const Sequence& z,
                           bool membership) {
  const Group& g = *p.alphabet;
  TripleOutcome out;
  auto fail = [&](int bit, const char* what) {
    if (!out.failed) out.first = what;
    out.failed |= static_cast<std::uint8_t>(1u << bit);
  };
  auto mul = [&](const Sequence& a, const Sequence& b) { return apply_op(g, a, b); };
  const Sequence xs = star(g, x);
  const Sequence ys = star(g, y);
  if (mul(mul(x, y), z) != mul(x, mul(y, z))) fail(0, "associativity");
  if (mul(mul(x, xs), x) != x || mul(mul(xs, x), xs) != xs) fail(1, "regularity");
  const Sequence ex = mul(x, xs), ey = mul(y, ys);
  if (mul(ex, ey) != mul(ey, ex)) fail(2, "idempotents_commute");
  if (shift(mul(x, y)) != mul(shift(x), shift(y))) fail(3, "shift_homomorphism");
  const Sequence en = idempotent(p, x.length());
  if (ex != en || mul(xs, x) != en) fail(4, "green_classes");
  if (membership && (!contains(p, mul(x, y)) || !contains(p, xs))) fail(5, "closure");
  // e^n * x agrees with x up to min(n, l(x)) and is empty after.
  const Index n = y.is_finite() ? y.length() : 2;
  const Sequence ex2 = mul(idempotent(p, n), x);
  const Index cut = std::min(n, x.length());
  const Index lo = p.axis == Axis::OneSided ? 0 : -8;
  for (Index i = lo; i <= 8; ++i) {
    Letter want = i <= cut ? x.at(i) : std::nullopt;
    if (ex2.at(i) != want) {
      fail(6, "prefix_agreement");
      break;
    }
  }
  return out;
}

}  // namespace

AxiomReport axiom_suite(const ShiftPresentation& p, const std::vector<Sequence>& samples, Exec exec,
                        bool check_membership) {
  AxiomReport r;
  r.triples = samples.size() / 3;
  auto outcomes = run_indexed<TripleOutcome>(r.triples, exec, [&](std::size_t t) {
    return check_triple(p, samples[3 * t], samples[3 * t + 1], samples[3 * t + 2], check_membership);
  });
  std::size_t* counters[] = {&r.associativity, &r.regularity, &r.idempotents_commute, &r.shift_homomorphism,
                             &r.green_classes, &r.closure, &r.prefix_agreement};
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const auto& o = outcomes[t];
    for (int bit = 0; bit < 7; ++bit)
      if (o.failed & (1u << bit)) ++*counters[bit];
    if (o.failed && r.witnesses.size() < 5) {
      const Group& g = *p.alphabet;
      r.witnesses.push_back({{"check", o.first},
                             {"x", sequence_to_json(g, samples[3 * t])},
                             {"y", sequence_to_json(g, samples[3 * t + 1])},
                             {"z", sequence_to_json(g, samples[3 * t + 2])}});
    }
  }
  return r;
}

}  // namespace shiftforge
