#include "shiftforge/coset_structure.hpp"

#include <map>

namespace shiftforge {

namespace {

GroupPtr blocks_of_len(const ShiftPresentation& p, std::size_t k) {
  return k == 1 ? p.alphabet : make_block_group(p.alphabet, k);
}

json word_json(const Group& g, const Word& w) {
  json a = json::array();
  for (const auto& e : w) a.push_back(g.encode(e));
  return a;
}

json coset_json(const Group& g, const Coset& c) {
  return {{"rep", word_json(g, unflatten(c.rep, g.arity()))}, {"subgroup", c.subgroup->descriptor()}};
}

SubgroupPtr identity_subgroup(const ShiftPresentation& p, std::size_t n, std::size_t k, Side side,
                              std::size_t bound) {
  if (n == 0 || k == 0) throw Error(Errc::ValidationError, "block lengths must be >= 1");
  const Word ones(n, p.alphabet->identity());
  FollowerResult r = side == Side::Follower ? follower_set(p, ones, k, bound) : predecessor_set(p, ones, k, bound);
  SubgroupPtr s;
  GroupPtr parent = blocks_of_len(p, k);
  if (r.coset) {
    if (!coset_contains(*r.coset, parent->identity()))
      throw Error(Errc::NotClosed, "identity block missing from its own follower set");
    s = r.coset->subgroup;
  } else if (r.complete) {
    std::vector<Element> elems;
    for (const auto& w : r.elements) elems.push_back(flatten(w));
    try {
      s = make_finite_subgroup(parent, elems, side == Side::Follower ? "F_k(1^n)" : "P_k(1^n)");
    } catch (const Error& e) {
      throw Error(Errc::NotClosed, std::string(side == Side::Follower ? "follower" : "predecessor") +
                                       " set of the identity block is not a subgroup: " + e.what());
    }
  } else {
    auto pp = &p;
    const std::size_t ar = p.alphabet->arity();
    s = make_predicate_subgroup(parent, side == Side::Follower ? "F_k(1^n)" : "P_k(1^n)",
                                [pp, ones, ar, side](const Element& e) {
                                  Word b = unflatten(e, ar);
                                  Word w = side == Side::Follower ? ones : b;
                                  const Word& tail = side == Side::Follower ? b : ones;
                                  w.insert(w.end(), tail.begin(), tail.end());
                                  return in_language(*pp, w);
                                });
  }
  auto chk = check_subgroup(*s, bound);
  if (!chk.closed) throw Error(Errc::NotClosed, "identity follower set fails closure: " + chk.witness.dump());
  return s;
}

}  // namespace

SubgroupPtr follower_subgroup(const ShiftPresentation& p, std::size_t n, std::size_t k, std::size_t bound) {
  return identity_subgroup(p, n, k, Side::Follower, bound);
}

SubgroupPtr predecessor_subgroup(const ShiftPresentation& p, std::size_t n, std::size_t k, std::size_t bound) {
  return identity_subgroup(p, n, k, Side::Predecessor, bound);
}

Coset follower_coset(const ShiftPresentation& p, const Word& a, std::size_t k, Side side, std::size_t bound) {
  FollowerResult r = side == Side::Follower ? follower_set(p, a, k, bound) : predecessor_set(p, a, k, bound);
  if (r.coset) return *r.coset;
  if (r.elements.empty()) throw Error(Errc::LawViolation, "empty follower set for " + word_str(a));
  SubgroupPtr base = identity_subgroup(p, a.size(), k, side, bound);
  const Group& g = *base->parent();
  Coset c{flatten(r.elements.front()), base};
  for (const auto& w : r.elements)
    if (!coset_contains(c, flatten(w)))
      throw Error(Errc::LawViolation, word_str(w) + " lies outside " + word_str(r.elements.front()) + " F_k(1^n)");
  if (base->is_finite() && r.complete && base->elements().size() != r.elements.size())
    throw Error(Errc::LawViolation, "follower set of " + word_str(a) + " is not a full coset");
  (void)g;
  return canonicalize(c);
}

json SubgroupCheck::to_json() const {
  json j{{"closed", closed}, {"normal", normal}, {"exact", exact}, {"bound", bound}};
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

SubgroupCheck check_subgroup(const SubgroupHandle& h, std::size_t bound) {
  SubgroupCheck r;
  r.bound = bound;
  const Group& g = *h.parent();
  r.exact = h.is_finite() && (g.is_abelian() || (g.order() && *g.order() <= bound));
  if (auto w = closure_witness(h, bound)) {
    r.closed = false;
    r.witness = {{"kind", "closure"}, {"a", g.encode(w->first)}, {"b", g.encode(w->second)}};
  }
  if (auto w = normality_witness(h, bound)) {
    r.normal = false;
    r.witness = {{"kind", "normality"}, {"g", g.encode(w->first)}, {"h", g.encode(w->second)}};
  }
  return r;
}

json LawReport::to_json() const {
  json j{{"holds", holds}, {"exact_checks", exact_checks}, {"brute_checks", brute_checks}, {"bound", bound}};
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

namespace {

// All words of length k over `letters`, in odometer order.
template <class F>
void for_each_word(const std::vector<Element>& letters, std::size_t k, F&& fn) {
  std::vector<std::size_t> idx(k, 0);
  Word w(k, letters.front());
  while (true) {
    for (std::size_t i = 0; i < k; ++i) w[i] = letters[idx[i]];
    fn(w);
    std::size_t i = k;
    while (i > 0 && ++idx[i - 1] == letters.size()) idx[--i] = 0;
    if (i == 0) return;
  }
}

std::vector<Element> coset_sample(const Coset& c, std::size_t n) {
  std::vector<Element> out;
  const Group& g = *c.subgroup->parent();
  for (const auto& s : c.subgroup->prefix(n)) out.push_back(g.multiply(c.rep, s));
  return out;
}

}  // namespace

LawReport coset_law_check(const ShiftPresentation& p, const Word& a, std::size_t k, std::size_t bound) {
  LawReport r;
  r.bound = bound;
  const Group& g0 = *p.alphabet;
  Coset f = follower_coset(p, a, k, Side::Follower, bound);
  SubgroupPtr s = follower_subgroup(p, a.size(), k, bound);
  const Group& g = *s->parent();
  auto fail = [&](const std::string& what, const Element& b) {
    if (!r.holds) return;
    r.holds = false;
    r.witness = {{"check", what}, {"a", word_json(g0, a)}, {"k", k}, {"b", word_json(g0, unflatten(b, g0.arity()))}};
  };
  if (!subgroups_agree(*f.subgroup, *s, bound)) fail("subgroup", f.rep);
  auto svals = s->prefix(8);
  auto fvals = coset_sample(f, 8);
  for (const auto& b : fvals) {
    const Element binv = g.inverse(b);
    for (const auto& h : svals) {
      ++r.exact_checks;
      if (!coset_contains(f, g.multiply(b, h))) fail("b F(1^n) in F(a)", b);
      if (!coset_contains(f, g.multiply(h, b))) fail("F(1^n) b in F(a)", b);
    }
    for (const auto& c : fvals) {
      ++r.exact_checks;
      if (!s->contains(g.multiply(binv, c)) || !s->contains(g.multiply(c, binv))) fail("F(a) in b F(1^n)", c);
    }
  }
  std::vector<Element> letters;
  for (auto& e : g0.prefix(bound))
    if (letter_in_alphabet(p, e)) letters.push_back(std::move(e));
  FollowerResult brute = bounded_followers(p, a, k, bound);
  std::set<Word> found(brute.elements.begin(), brute.elements.end());
  double total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= static_cast<double>(letters.size());
  if (!letters.empty() && total <= 65536) {
    for_each_word(letters, k, [&](const Word& c) {
      ++r.brute_checks;
      if (found.count(c) != static_cast<std::size_t>(coset_contains(f, flatten(c)))) fail("brute force", flatten(c));
    });
  } else {
    for (const auto& c : brute.elements) {
      ++r.brute_checks;
      if (!coset_contains(f, flatten(c))) fail("brute force", flatten(c));
    }
  }
  return r;
}

LawReport product_law_check(const ShiftPresentation& p, const Word& a, const Word& b, std::size_t k,
                            std::size_t bound) {
  LawReport r;
  r.bound = bound;
  const Group& g0 = *p.alphabet;
  const Word ab = multiply_words(g0, a, b);
  auto fail = [&](const std::string& what) {
    if (!r.holds) return;
    r.holds = false;
    r.witness = {{"check", what}, {"a", word_json(g0, a)}, {"b", word_json(g0, b)}, {"k", k}};
  };
  if (!in_language(p, ab)) {
    fail("a b not in the language");
    return r;
  }
  Coset fa = follower_coset(p, a, k, Side::Follower, bound);
  Coset fb = follower_coset(p, b, k, Side::Follower, bound);
  Coset fab = follower_coset(p, ab, k, Side::Follower, bound);
  ++r.exact_checks;
  if (!coset_eq(coset_mul(fa, fb), fab)) fail("F(a) F(b) = F(ab)");
  const Group& g = *fa.subgroup->parent();
  for (const auto& x : coset_sample(fa, 4))
    for (const auto& y : coset_sample(fb, 4)) {
      ++r.exact_checks;
      if (!coset_contains(fab, g.multiply(x, y))) fail("x y in F(ab)");
    }
  auto bx = bounded_followers(p, a, k, bound).elements;
  auto by = bounded_followers(p, b, k, bound).elements;
  for (std::size_t i = 0; i < bx.size() && i < 8; ++i)
    for (std::size_t j = 0; j < by.size() && j < 8; ++j) {
      ++r.brute_checks;
      Word w = ab;
      Word xy = multiply_words(g0, bx[i], by[j]);
      w.insert(w.end(), xy.begin(), xy.end());
      if (!in_language(p, w)) fail("brute force product");
    }
  return r;
}

// ------------------------------------------------------------- families

json ClassFamily::to_json(const Group& g) const {
  json cls = json::array();
  for (std::size_t i = 0; i < classes.size() && i < 16; ++i)
    cls.push_back({{"rep", word_json(g, unflatten(classes[i].rep, g.arity()))}, {"source", word_json(g, sources[i])}});
  return {{"side", side == Side::Follower ? "follower" : "predecessor"},
          {"n", n},
          {"k", k},
          {"count", classes.size()},
          {"complete", complete},
          {"stabilized", stabilized},
          {"letter_bound", letter_bound},
          {"disjoint", disjoint},
          {"product_closed", product_closed},
          {"base", base->descriptor()},
          {"classes", cls}};
}

namespace {

void collect_classes(const ShiftPresentation& p, ClassFamily& fam, std::size_t letters) {
  fam.classes.clear();
  fam.sources.clear();
  Language lang = language(p, fam.n, letters);
  fam.complete = lang.complete && lang.words.size() <= 4096;
  std::map<Element, std::size_t> seen;
  for (std::size_t i = 0; i < lang.words.size() && i < 4096; ++i) {
    const Word& a = lang.words[i];
    Coset c = follower_coset(p, a, fam.k, fam.side);
    bool dup = false;
    if (c.subgroup->has_canonical()) {
      dup = !seen.emplace(c.rep, fam.classes.size()).second;
    } else {
      for (const auto& d : fam.classes)
        if (coset_eq(c, d)) {
          dup = true;
          break;
        }
    }
    if (!dup) {
      fam.classes.push_back(c);
      fam.sources.push_back(a);
    }
  }
}

}  // namespace

ClassFamily class_family(const ShiftPresentation& p, std::size_t n, std::size_t k, Side side, std::size_t bound) {
  ClassFamily fam;
  fam.n = n;
  fam.k = k;
  fam.side = side;
  fam.letter_bound = bound;
  fam.base = identity_subgroup(p, n, k, side, bound);
  collect_classes(p, fam, bound);
  if (fam.complete) {
    fam.stabilized = true;
  } else {
    ClassFamily wide = fam;
    collect_classes(p, wide, 2 * bound);
    fam.stabilized = wide.classes.size() == fam.classes.size();
  }
  const std::size_t cap = std::min<std::size_t>(fam.classes.size(), 16);
  for (std::size_t i = 0; i < cap; ++i)
    for (std::size_t j = 0; j < cap; ++j) {
      if (i != j)
        for (const auto& x : coset_sample(fam.classes[i], 4))
          if (coset_contains(fam.classes[j], x)) fam.disjoint = false;
      Word ab = multiply_words(*p.alphabet, fam.sources[i], fam.sources[j]);
      if (!in_language(p, ab)) {
        fam.product_closed = false;
        continue;
      }
      Coset cab = follower_coset(p, ab, k, side);
      if (!coset_eq(coset_mul(fam.classes[i], fam.classes[j]), cab)) fam.product_closed = false;
    }
  return fam;
}

ClassFamilies class_families(const ShiftPresentation& p, std::size_t n, std::size_t k, std::size_t bound) {
  return {class_family(p, n, k, Side::Follower, bound), class_family(p, n, k, Side::Predecessor, bound)};
}

json TauReport::to_json(const Group& g) const {
  json m = json::array();
  for (std::size_t i = 0; i < mapping.size() && i < 16; ++i) m.push_back({{"class", mapping[i].first}, {"image", coset_json(g, mapping[i].second)}});
  json j{{"classes", classes},       {"targets", targets},       {"well_defined", well_defined},
         {"injective", injective},   {"multiplicative", multiplicative}, {"sizes_match", sizes_match},
         {"mapping", m}};
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

TauReport tau_bijection(const ShiftPresentation& p, std::size_t n, std::size_t k, std::size_t bound) {
  TauReport r;
  const Group& g0 = *p.alphabet;
  const std::size_t ar = g0.arity();
  ClassFamily fam = class_family(p, n, k, Side::Follower, bound);
  ClassFamily back = class_family(p, k, n, Side::Predecessor, bound);
  r.classes = fam.classes.size();
  r.targets = back.classes.size();
  const std::size_t cap = std::min<std::size_t>(fam.classes.size(), 32);
  std::vector<Coset> images;
  for (std::size_t i = 0; i < cap; ++i) {
    auto reps = coset_sample(fam.classes[i], 3);
    Coset t = follower_coset(p, unflatten(reps.front(), ar), n, Side::Predecessor, bound);
    for (std::size_t j = 1; j < reps.size(); ++j) {
      Coset u = follower_coset(p, unflatten(reps[j], ar), n, Side::Predecessor, bound);
      if (!coset_eq(t, u))
        throw Error(Errc::WellDefinednessViolation,
                    "class " + std::to_string(i) + ": P_n differs between " + reps.front().str() + " and " + reps[j].str());
    }
    images.push_back(t);
    r.mapping.emplace_back(i, t);
  }
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j)
      if (coset_eq(images[i], images[j])) {
        r.injective = false;
        if (r.witness.is_null()) r.witness = {{"check", "injective"}, {"classes", {i, j}}};
      }
  const std::size_t mcap = std::min<std::size_t>(images.size(), 12);
  const Group& gk = fam.classes.empty() ? g0 : *fam.classes.front().subgroup->parent();
  for (std::size_t i = 0; i < mcap; ++i)
    for (std::size_t j = 0; j < mcap; ++j) {
      Element b = gk.multiply(fam.classes[i].rep, fam.classes[j].rep);
      Coset t = follower_coset(p, unflatten(b, ar), n, Side::Predecessor, bound);
      if (!coset_eq(t, coset_mul(images[i], images[j]))) {
        r.multiplicative = false;
        if (r.witness.is_null()) r.witness = {{"check", "multiplicative"}, {"classes", {i, j}}};
      }
    }
  const bool certified = fam.stabilized && back.stabilized;
  r.sizes_match = !certified || fam.classes.size() == back.classes.size();
  return r;
}

}  // namespace shiftforge
