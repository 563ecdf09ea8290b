#include "shiftforge/shift_space.hpp"

#include <algorithm>
#include <set>

namespace shiftforge {

namespace {

std::size_t left_arity(const ShiftPresentation& p) { return p.product()->left->alphabet->arity(); }

std::pair<Word, Word> split_word(const Word& w, std::size_t la) {
  Word l, r;
  for (const auto& e : w) {
    l.push_back(e.slice(0, la));
    r.push_back(e.slice(la, e.arity() - la));
  }
  return {l, r};
}

Word interleave(const Word& l, const Word& r) {
  Word out;
  for (std::size_t i = 0; i < l.size(); ++i) out.push_back(Element::concat(l[i], r[i]));
  return out;
}

GroupPtr block_parent(const GroupPtr& g, std::size_t k) { return k == 1 ? g : make_block_group(g, k); }

SubgroupPtr predicate_subgroup(GroupPtr parent, std::string name, std::function<bool(const Element&)> contains,
                               std::function<Element(const Element&)> canonical = {}) {
  return make_predicate_subgroup(std::move(parent), std::move(name), std::move(contains), std::move(canonical));
}

SubgroupPtr whole_of(const GroupPtr& g) {
  if (auto o = g->order(); o && *o > 4096)
    return predicate_subgroup(g, "whole", [](const Element&) { return true; },
                              [id = g->identity()](const Element&) { return id; });
  return make_whole_subgroup(g);
}

// Coset of words c with x_{i+m} in x_i K, following (or preceding) the word a.
Coset coset_step_follower(const GroupPtr& g, const SubgroupPtr& kk, int m, const Word& a, std::size_t k) {
  const std::size_t ar = g->arity();
  const long n = static_cast<long>(a.size());
  const long mm = m;
  Word rep;
  for (long j = 1; j <= static_cast<long>(k); ++j) {
    if (j - mm >= 1) rep.push_back(rep[static_cast<std::size_t>(j - mm - 1)]);
    else if (n + j - mm >= 1) rep.push_back(a[static_cast<std::size_t>(n + j - mm - 1)]);
    else rep.push_back(g->identity());
  }
  GroupPtr bg = block_parent(g, k);
  const std::string name = "F(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")";
  auto kind_of = [n, mm](long j) { return j - mm >= 1 ? 2 : (n + j - mm >= 1 ? 1 : 0); };
  auto contains = [g, kk, ar, mm, kind_of](const Element& e) {
    Word c = unflatten(e, ar);
    for (long j = 1; j <= static_cast<long>(c.size()); ++j) {
      const Element& cj = c[static_cast<std::size_t>(j - 1)];
      switch (kind_of(j)) {
        case 2:
          if (!kk->contains(g->multiply(g->inverse(c[static_cast<std::size_t>(j - mm - 1)]), cj))) return false;
          break;
        case 1:
          if (!kk->contains(cj)) return false;
          break;
        default: break;
      }
    }
    return true;
  };
  std::function<Element(const Element&)> canonical;
  if (kk->has_canonical()) {
    canonical = [g, kk, ar, mm, kind_of](const Element& e) {
      Word c = unflatten(e, ar);
      Word d, s;
      for (long j = 1; j <= static_cast<long>(c.size()); ++j) {
        const Element& cj = c[static_cast<std::size_t>(j - 1)];
        Element dj;
        switch (kind_of(j)) {
          case 2: dj = kk->canonical(g->multiply(cj, s[static_cast<std::size_t>(j - mm - 1)])); break;
          case 1: dj = kk->canonical(cj); break;
          default: dj = g->identity(); break;
        }
        s.push_back(g->multiply(g->inverse(cj), dj));
        d.push_back(dj);
      }
      return flatten(d);
    };
  }
  auto sub = predicate_subgroup(bg, name, contains, canonical);
  return canonicalize(Coset{flatten(rep), sub});
}

Coset coset_step_predecessor(const GroupPtr& g, const SubgroupPtr& kk, int m, const Word& a, std::size_t k) {
  const std::size_t ar = g->arity();
  const long n = static_cast<long>(a.size());
  const long kl = static_cast<long>(k);
  const long mm = m;
  // c_j sits at index j - k; its partner at j - k + m.
  auto kind_of = [n, kl, mm](long j) {
    long partner = j - kl + mm;
    if (partner <= 0) return 2;
    if (partner <= n) return 1;
    return 0;
  };
  Word rep(k, g->identity());
  for (long j = kl; j >= 1; --j) {
    switch (kind_of(j)) {
      case 2: rep[static_cast<std::size_t>(j - 1)] = rep[static_cast<std::size_t>(j + mm - 1)]; break;
      case 1: rep[static_cast<std::size_t>(j - 1)] = a[static_cast<std::size_t>(j - kl + mm - 1)]; break;
      default: break;
    }
  }
  GroupPtr bg = block_parent(g, k);
  const std::string name = "P(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")";
  auto contains = [g, kk, ar, mm, kind_of](const Element& e) {
    Word c = unflatten(e, ar);
    for (long j = static_cast<long>(c.size()); j >= 1; --j) {
      const Element& cj = c[static_cast<std::size_t>(j - 1)];
      switch (kind_of(j)) {
        case 2:
          if (!kk->contains(g->multiply(g->inverse(c[static_cast<std::size_t>(j + mm - 1)]), cj))) return false;
          break;
        case 1:
          if (!kk->contains(cj)) return false;
          break;
        default: break;
      }
    }
    return true;
  };
  std::function<Element(const Element&)> canonical;
  if (kk->has_canonical()) {
    canonical = [g, kk, ar, mm, kind_of](const Element& e) {
      Word c = unflatten(e, ar);
      Word d(c.size()), s(c.size());
      for (long j = static_cast<long>(c.size()); j >= 1; --j) {
        const Element& cj = c[static_cast<std::size_t>(j - 1)];
        Element dj;
        switch (kind_of(j)) {
          case 2: dj = kk->canonical(g->multiply(cj, s[static_cast<std::size_t>(j + mm - 1)])); break;
          case 1: dj = kk->canonical(cj); break;
          default: dj = g->identity(); break;
        }
        s[static_cast<std::size_t>(j - 1)] = g->multiply(g->inverse(cj), dj);
        d[static_cast<std::size_t>(j - 1)] = dj;
      }
      return flatten(d);
    };
  }
  auto sub = predicate_subgroup(bg, name, contains, canonical);
  return canonicalize(Coset{flatten(rep), sub});
}

bool window_ok(const ShiftPresentation& p, const Word& w, std::size_t end) {
  return std::visit(
      [&](const auto& b) -> bool {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, MarkovCoset>) {
          if (end == 0) return true;
          return b.f->apply(w[end - 1]) == b.f->codomain->project(w[end]);
        } else if constexpr (std::is_same_v<T, PredicateMStep>) {
          const std::size_t len = static_cast<std::size_t>(b.m) + 1;
          if (end + 1 < len) return true;
          Word win(w.begin() + static_cast<std::ptrdiff_t>(end + 1 - len),
                   w.begin() + static_cast<std::ptrdiff_t>(end + 1));
          return b.allowed(win);
        } else if constexpr (std::is_same_v<T, EdgeGraph>) {
          auto it = b.by_label.find(w[end]);
          if (it == b.by_label.end()) return false;
          if (end == 0) return true;
          auto prev = b.by_label.find(w[end - 1]);
          if (prev == b.by_label.end()) return false;
          return b.edges[prev->second].target == b.edges[it->second].source;
        } else if constexpr (std::is_same_v<T, ProductShift>) {
          auto [l, r] = split_word(w, b.left->alphabet->arity());
          return window_ok(*b.left, l, end) && window_ok(*b.right, r, end);
        } else {
          return true;
        }
      },
      p.body);
}

FollowerResult explicit_result(std::vector<Word> words, bool complete, std::size_t bound) {
  FollowerResult r;
  r.kind = FollowerResult::Kind::Explicit;
  r.elements = std::move(words);
  r.complete = complete;
  r.bound = bound;
  return r;
}

FollowerResult coset_result(Coset c, bool chain) {
  FollowerResult r;
  r.kind = chain ? FollowerResult::Kind::CosetChain : FollowerResult::Kind::CosetSet;
  r.coset = std::move(c);
  r.complete = true;
  return r;
}

std::vector<Element> candidate_letters(const ShiftPresentation& p, std::size_t bound) {
  std::vector<Element> out;
  for (auto& e : p.alphabet->prefix(bound))
    if (letter_in_alphabet(p, e)) out.push_back(std::move(e));
  return out;
}

bool search_complete(const ShiftPresentation& p, std::size_t bound) {
  auto o = p.alphabet->order();
  return o && bound >= *o;
}

void require_language(const ShiftPresentation& p, const Word& a) {
  if (a.empty()) throw Error(Errc::BlockNotInLanguage, "empty block");
  for (const auto& e : a)
    if (e.arity() != p.alphabet->arity() || !p.alphabet->is_valid(e))
      throw Error(Errc::MixedAlphabet, "letter " + e.str() + " outside " + p.alphabet->kind());
  if (!in_language(p, a)) throw Error(Errc::BlockNotInLanguage, word_str(a));
}

FollowerResult combine_product(const ShiftPresentation& p, const FollowerResult& l, const FollowerResult& r,
                               std::size_t k) {
  const std::size_t la = left_arity(p);
  const std::size_t ar = p.alphabet->arity();
  if (l.coset && r.coset) {
    Word lw = unflatten(l.coset->rep, la);
    Word rw = unflatten(r.coset->rep, ar - la);
    auto ls = l.coset->subgroup;
    auto rs = r.coset->subgroup;
    auto contains = [ls, rs, la, ar](const Element& e) {
      auto [x, y] = split_word(unflatten(e, ar), la);
      return ls->contains(flatten(x)) && rs->contains(flatten(y));
    };
    std::function<Element(const Element&)> canonical;
    if (ls->has_canonical() && rs->has_canonical()) {
      canonical = [ls, rs, la, ar](const Element& e) {
        auto [x, y] = split_word(unflatten(e, ar), la);
        Word cx = unflatten(ls->canonical(flatten(x)), la);
        Word cy = unflatten(rs->canonical(flatten(y)), ar - la);
        return flatten(interleave(cx, cy));
      };
    }
    auto sub = predicate_subgroup(block_parent(p.alphabet, k), ls->name() + "x" + rs->name(), contains, canonical);
    return coset_result(canonicalize(Coset{flatten(interleave(lw, rw)), sub}),
                        l.kind == FollowerResult::Kind::CosetChain || r.kind == FollowerResult::Kind::CosetChain);
  }
  auto expand = [](const FollowerResult& f, std::size_t ar0, std::size_t bound) {
    if (f.kind == FollowerResult::Kind::Explicit) return f.elements;
    std::vector<Word> out;
    for (const auto& s : f.coset->subgroup->prefix(bound)) {
      const auto& g = *f.coset->subgroup->parent();
      out.push_back(unflatten(g.multiply(f.coset->rep, s), ar0));
    }
    return out;
  };
  std::size_t bound = std::max<std::size_t>({l.bound, r.bound, 16});
  std::vector<Word> out;
  for (const auto& x : expand(l, la, bound))
    for (const auto& y : expand(r, ar - la, bound)) out.push_back(interleave(x, y));
  bool complete = (l.kind == FollowerResult::Kind::Explicit ? l.complete : l.coset->subgroup->is_finite()) &&
                  (r.kind == FollowerResult::Kind::Explicit ? r.complete : r.coset->subgroup->is_finite());
  return explicit_result(std::move(out), complete, bound);
}

SubgroupPtr markov_follower_chain(const GroupPtr& g, const MarkovCoset& mc, std::size_t k) {
  if (k == 1) return mc.n;
  const std::size_t ar = g->arity();
  auto n = mc.n;
  auto f = mc.f;
  auto contains = [n, f, ar](const Element& e) {
    Word b = unflatten(e, ar);
    if (!n->contains(b[0])) return false;
    for (std::size_t j = 0; j + 1 < b.size(); ++j)
      if (f->apply(b[j]) != f->codomain->project(b[j + 1])) return false;
    return true;
  };
  std::function<Element(const Element&)> canonical;
  if (n->has_canonical()) {
    canonical = [g, n, f, ar](const Element& e) {
      Word c = unflatten(e, ar);
      Word d;
      Element s;
      for (std::size_t j = 0; j < c.size(); ++j) {
        Element dj = j == 0 ? n->canonical(c[0]) : n->canonical(g->multiply(c[j], f->apply(s)));
        s = g->multiply(g->inverse(c[j]), dj);
        d.push_back(dj);
      }
      return flatten(d);
    };
  }
  return predicate_subgroup(make_block_group(g, k), "F_" + std::to_string(k), contains, canonical);
}

SubgroupPtr markov_kernel(const GroupPtr& g, const MarkovCoset& mc) {
  if (mc.f->kernel) return mc.f->kernel;
  auto f = mc.f;
  return predicate_subgroup(g, "ker", [f](const Element& a) { return f->in_kernel(a); });
}

SubgroupPtr markov_predecessor_chain(const GroupPtr& g, const MarkovCoset& mc, std::size_t k) {
  if (k == 1) return markov_kernel(g, mc);
  const std::size_t ar = g->arity();
  auto f = mc.f;
  auto contains = [f, ar](const Element& e) {
    Word c = unflatten(e, ar);
    if (!f->in_kernel(c.back())) return false;
    for (std::size_t j = 0; j + 1 < c.size(); ++j)
      if (f->apply(c[j]) != f->codomain->project(c[j + 1])) return false;
    return true;
  };
  return predicate_subgroup(make_block_group(g, k), "P_" + std::to_string(k), contains);
}

}  // namespace

// ------------------------------------------------------------ construction

ShiftPtr make_full_shift(GroupPtr g, Axis axis) {
  auto p = std::make_shared<ShiftPresentation>();
  p->name = "full";
  p->alphabet = std::move(g);
  p->axis = axis;
  p->body = FullShift{};
  p->descriptor = {{"kind", "full"}, {"axis", axis_name(axis)}};
  return p;
}

ShiftPtr make_markov_coset(GroupPtr g, Axis axis, SubgroupPtr n, HomPtr f, std::string name) {
  if (!n->parent()->same_as(*g) || !f->domain->same_as(*g))
    throw Error(Errc::MixedAlphabet, "markov_coset pieces live on different alphabets");
  auto p = std::make_shared<ShiftPresentation>();
  p->name = std::move(name);
  p->alphabet = std::move(g);
  p->axis = axis;
  p->descriptor = {{"kind", "markov_coset"}, {"axis", axis_name(axis)}, {"subgroup", n->descriptor()},
                   {"hom", f->descriptor}};
  p->body = MarkovCoset{std::move(n), std::move(f)};
  return p;
}

ShiftPtr make_coset_step_shift(GroupPtr g, Axis axis, int m, SubgroupPtr k, std::string name) {
  if (m < 1) throw Error(Errc::ValidationError, "step count must be >= 1");
  auto p = std::make_shared<ShiftPresentation>();
  p->name = name;
  p->alphabet = g;
  p->axis = axis;
  PredicateMStep pm;
  pm.m = m;
  pm.name = name;
  pm.allowed = [g, k](const Word& w) { return k->contains(g->multiply(g->inverse(w.front()), w.back())); };
  pm.follower = [g, k, m](const Word& a, std::size_t kk) { return coset_step_follower(g, k, m, a, kk); };
  pm.predecessor = [g, k, m](const Word& a, std::size_t kk) { return coset_step_predecessor(g, k, m, a, kk); };
  p->body = std::move(pm);
  p->descriptor = {{"kind", "predicate_mstep"}, {"axis", axis_name(axis)}, {"m", m}, {"predicate", name}};
  return p;
}

ShiftPtr make_edge_graph(GroupPtr g, Axis axis, std::vector<EdgeGraph::Edge> edges) {
  auto p = std::make_shared<ShiftPresentation>();
  p->name = "edge_graph";
  p->alphabet = g;
  p->axis = axis;
  EdgeGraph eg;
  json desc = json::array();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    g->validate(edges[i].label);
    if (!eg.by_label.emplace(edges[i].label, i).second)
      throw Error(Errc::ValidationError, "edge label used twice: " + g->label(edges[i].label));
    desc.push_back({{"label", g->encode(edges[i].label)}, {"source", edges[i].source}, {"target", edges[i].target}});
  }
  eg.edges = std::move(edges);
  p->body = std::move(eg);
  p->descriptor = {{"kind", "edge_graph"}, {"axis", axis_name(axis)}, {"edges", desc}};
  return p;
}

ShiftPtr make_periodic_points(GroupPtr g, Axis axis) {
  auto p = std::make_shared<ShiftPresentation>();
  p->name = "periodic_points";
  p->alphabet = std::move(g);
  p->axis = axis;
  p->body = PeriodicPoints{};
  p->descriptor = {{"kind", "periodic_points"}, {"axis", axis_name(axis)}};
  return p;
}

ShiftPtr product_shift(const ShiftPtr& a, const ShiftPtr& b) {
  if (a->axis != b->axis) throw Error(Errc::MixedAxis, "product of shifts on different axes");
  auto p = std::make_shared<ShiftPresentation>();
  p->name = a->name + "⊠" + b->name;
  p->alphabet = make_product({a->alphabet, b->alphabet});
  p->axis = a->axis;
  p->body = ProductShift{a, b};
  p->descriptor = {{"kind", "product"}, {"axis", axis_name(a->axis)}, {"factors", {a->descriptor, b->descriptor}}};
  return p;
}

ShiftPtr shift_from_json(GroupPtr g, const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::ParseError, "shift needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  const Axis axis = axis_from_string(j.value("axis", std::string("two_sided")));
  if (kind == "full") return make_full_shift(g, axis);
  if (kind == "periodic_points") return make_periodic_points(g, axis);
  if (kind == "markov_coset") {
    auto n = subgroup_from_json(g, j.at("subgroup"));
    auto f = hom_from_json(g, n, j.at("hom"));
    if (auto w = hom_witness(*f, 32))
      throw Error(Errc::ValidationError, "/shift/hom is not a homomorphism at (" + g->label(w->first) + ", " +
                                             g->label(w->second) + ")");
    return make_markov_coset(g, axis, n, f, j.value("name", std::string("markov_coset")));
  }
  if (kind == "predicate_mstep") {
    const std::string pred = j.at("predicate").get<std::string>();
    int m = j.value("m", 0);
    auto expect = [&](const char* alpha, int mm) {
      if (g->kind() != alpha) throw Error(Errc::ValidationError, "/shift/predicate " + pred + " needs alphabet " + alpha);
      if (m != 0 && m != mm) throw Error(Errc::ValidationError, "/shift/m does not match predicate " + pred);
      m = mm;
    };
    if (pred == "z_parity") {
      expect("int", 2);
      return make_coset_step_shift(g, axis, m, make_builtin_subgroup(g, "evens"), pred);
    }
    if (pred == "z2_second_coord") {
      expect("int_pair", 1);
      return make_coset_step_shift(g, axis, m, make_generated_subgroup(g, {Element{1, 0}}), pred);
    }
    if (pred == "prufer_rho2") {
      expect("prufer2", 2);
      return make_coset_step_shift(g, axis, m, make_builtin_subgroup(g, "prufer2_H1"), pred);
    }
    if (pred == "coset_step") {
      if (m < 1) throw Error(Errc::ValidationError, "/shift/m must be >= 1");
      return make_coset_step_shift(g, axis, m, subgroup_from_json(g, j.at("subgroup")), pred);
    }
    throw Error(Errc::ValidationError, "/shift/predicate unknown: " + pred);
  }
  if (kind == "edge_graph") {
    std::vector<EdgeGraph::Edge> edges;
    for (const auto& e : j.at("edges"))
      edges.push_back({g->decode(e.at("label")), e.at("source").get<std::string>(), e.at("target").get<std::string>()});
    return make_edge_graph(g, axis, std::move(edges));
  }
  if (kind == "product") {
    auto factors = product_factors(g);
    const auto& fj = j.at("factors");
    if (g->kind() != "product" || factors.size() != 2 || fj.size() != 2)
      throw Error(Errc::ValidationError, "/shift/factors: product shifts need a two-factor product alphabet");
    json a = fj[0], b = fj[1];
    if (!a.contains("axis")) a["axis"] = axis_name(axis);
    if (!b.contains("axis")) b["axis"] = axis_name(axis);
    return product_shift(shift_from_json(factors[0], a), shift_from_json(factors[1], b));
  }
  throw Error(Errc::ParseError, "unknown shift kind: " + kind);
}

// ------------------------------------------------------------- membership

std::size_t window_size(const ShiftPresentation& p) {
  return std::visit(
      [&](const auto& b) -> std::size_t {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, MarkovCoset> || std::is_same_v<T, EdgeGraph>) return 2;
        else if constexpr (std::is_same_v<T, PredicateMStep>) return static_cast<std::size_t>(b.m) + 1;
        else if constexpr (std::is_same_v<T, ProductShift>) return std::max(window_size(*b.left), window_size(*b.right));
        else return 1;
      },
      p.body);
}

bool letter_in_alphabet(const ShiftPresentation& p, const Element& a) {
  if (a.arity() != p.alphabet->arity() || !p.alphabet->is_valid(a)) return false;
  if (auto eg = p.edge_graph()) return eg->by_label.count(a) > 0;
  if (auto pr = p.product()) {
    const std::size_t la = pr->left->alphabet->arity();
    return letter_in_alphabet(*pr->left, a.slice(0, la)) &&
           letter_in_alphabet(*pr->right, a.slice(la, a.arity() - la));
  }
  return true;
}

bool last_window_allowed(const ShiftPresentation& p, const Word& w) {
  if (w.empty()) return true;
  return window_ok(p, w, w.size() - 1);
}

bool in_language(const ShiftPresentation& p, const Word& w) {
  for (std::size_t e = 0; e < w.size(); ++e) {
    if (!letter_in_alphabet(p, w[e])) return false;
    if (!window_ok(p, w, e)) return false;
  }
  return true;
}

bool transition_allowed(const ShiftPresentation& p, const Element& a, const Element& b) {
  return in_language(p, Word{a, b});
}

bool letters_infinite(const ShiftPresentation& p) {
  if (p.edge_graph()) return false;
  if (auto pr = p.product()) return letters_infinite(*pr->left) || letters_infinite(*pr->right);
  return !p.alphabet->is_finite();
}

bool space_finite(const ShiftPresentation& p) {
  if (letters_infinite(p)) return false;
  if (p.is_full() || p.is_periodic_points()) return *p.alphabet->order() == 1;
  if (auto pr = p.product()) return space_finite(*pr->left) && space_finite(*pr->right);
  if (auto mc = p.markov()) {
    auto ker = markov_kernel(p.alphabet, *mc);
    return mc->n->elements().size() == 1 && ker->elements().size() == 1;
  }
  // Graph on words of length w-1: finite iff the essential part is a union of cycles.
  const std::size_t ws = window_size(p);
  const std::size_t all = *p.alphabet->order();
  auto nodes = language(p, ws - 1, all).words;
  auto edges = language(p, ws, all).words;
  std::set<Word> alive(nodes.begin(), nodes.end());
  bool changed = true;
  std::map<Word, int> out, in;
  while (changed) {
    changed = false;
    out.clear();
    in.clear();
    for (const auto& e : edges) {
      Word s(e.begin(), e.end() - 1), t(e.begin() + 1, e.end());
      if (alive.count(s) && alive.count(t)) {
        ++out[s];
        ++in[t];
      }
    }
    for (auto it = alive.begin(); it != alive.end();) {
      if (!out.count(*it) || !in.count(*it)) {
        it = alive.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  for (const auto& v : alive)
    if (out[v] != 1 || in[v] != 1) return false;
  return true;
}

namespace {

bool follower_infinite(const ShiftPresentation& p, const Sequence& x) {
  const Index len = x.length();
  const std::size_t ws = window_size(p);
  const Index want = static_cast<Index>(std::max<std::size_t>(1, ws - 1));
  Index start = len - want + 1;
  if (x.axis() == Axis::OneSided) start = std::max<Index>(0, start);
  Word suffix;
  for (Index i = start; i <= len; ++i) suffix.push_back(*x.at(i));
  return std::visit(
      [&](const auto& b) -> bool {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, FullShift>) return !p.alphabet->is_finite();
        else if constexpr (std::is_same_v<T, MarkovCoset>) return !b.n->is_finite() && !p.alphabet->is_finite();
        else if constexpr (std::is_same_v<T, PredicateMStep>) {
          if (!b.follower) throw Error(Errc::Unsupported, "predicate shift without follower oracle");
          return follower_set(p, suffix, 1).infinite();
        } else {
          return false;
        }
      },
      p.body);
}

bool sequence_language_ok(const ShiftPresentation& p, const Sequence& x) {
  if (x.is_empty()) return true;
  const std::size_t ws = window_size(p);
  if (x.is_finite() && x.axis() == Axis::OneSided && x.middle().size() < ws) return in_language(p, x.middle());
  for (const auto& w : words_of(x, ws))
    if (!in_language(p, w)) return false;
  return true;
}

void check_letters(const ShiftPresentation& p, const Sequence& x) {
  auto check = [&](const Word& w) {
    for (const auto& e : w)
      if (e.arity() != p.alphabet->arity() || !p.alphabet->is_valid(e))
        throw Error(Errc::MixedAlphabet, "letter " + e.str() + " outside " + p.alphabet->kind());
  };
  check(x.left_period());
  check(x.middle());
  check(x.right_period());
}

}  // namespace

bool contains(const ShiftPresentation& p, const Sequence& x) {
  if (x.axis() != p.axis) throw Error(Errc::MixedAxis, "sequence and shift axes differ");
  check_letters(p, x);
  if (x.is_empty()) return p.axis == Axis::OneSided ? letters_infinite(p) : !space_finite(p);
  if (p.is_periodic_points()) {
    if (x.is_finite()) return false;
    if (x.axis() == Axis::OneSided) return x.middle().empty();
    return x.middle().empty() && x.left_period() == x.right_period() && x.base() == 0;
  }
  if (auto pr = p.product()) {
    auto [l, r] = product_split(x, pr->left->alphabet->arity());
    if (!x.is_finite()) return contains(*pr->left, l) && contains(*pr->right, r);
    if (!sequence_language_ok(*pr->left, l) || !sequence_language_ok(*pr->right, r)) return false;
    return follower_infinite(*pr->left, l) || follower_infinite(*pr->right, r);
  }
  if (!sequence_language_ok(p, x)) return false;
  if (!x.is_finite()) return true;
  return follower_infinite(p, x);
}

// ---------------------------------------------------------- follower sets

bool FollowerResult::contains(const Word& b) const {
  if (coset) return coset_contains(*coset, flatten(b));
  return std::find(elements.begin(), elements.end(), b) != elements.end();
}

std::optional<std::size_t> FollowerResult::size() const {
  if (coset) return coset->subgroup->order();
  if (complete) return elements.size();
  return std::nullopt;
}

bool FollowerResult::infinite() const {
  return coset && !coset->subgroup->is_finite() && !coset->subgroup->parent()->is_finite();
}

json FollowerResult::to_json(const Group& g) const {
  auto word_json = [&](const Word& w) {
    json a = json::array();
    for (const auto& e : w) a.push_back(g.encode(e));
    return a;
  };
  json j;
  if (coset) {
    j["kind"] = kind == Kind::CosetChain ? "coset_chain" : "coset_set";
    j["rep"] = word_json(unflatten(coset->rep, g.arity()));
    j["subgroup"] = coset->subgroup->descriptor();
    j["finite"] = coset->subgroup->is_finite();
    if (auto s = size()) {
      j["size"] = *s;
      if (*s <= 64) {
        json els = json::array();
        const auto& pg = *coset->subgroup->parent();
        for (const auto& h : coset->subgroup->elements())
          els.push_back(word_json(unflatten(pg.multiply(coset->rep, h), g.arity())));
        j["elements"] = els;
      }
    }
  } else {
    j["kind"] = "explicit";
    json els = json::array();
    for (const auto& w : elements) els.push_back(word_json(w));
    j["elements"] = els;
    j["complete"] = complete;
    j["bound"] = bound;
  }
  return j;
}

FollowerResult bounded_followers(const ShiftPresentation& p, const Word& a, std::size_t k, std::size_t bound) {
  require_language(p, a);
  auto letters = candidate_letters(p, bound);
  std::vector<Word> out;
  Word w = a;
  std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
    if (depth == k) {
      out.emplace_back(w.end() - static_cast<std::ptrdiff_t>(k), w.end());
      return;
    }
    for (const auto& c : letters) {
      w.push_back(c);
      if (window_ok(p, w, w.size() - 1)) dfs(depth + 1);
      w.pop_back();
    }
  };
  dfs(0);
  return explicit_result(std::move(out), search_complete(p, bound), bound);
}

FollowerResult bounded_predecessors(const ShiftPresentation& p, const Word& a, std::size_t k,
                                    std::size_t bound) {
  require_language(p, a);
  auto letters = candidate_letters(p, bound);
  const std::size_t ws = window_size(p);
  std::vector<Word> out;
  Word w = a;
  std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
    if (depth == k) {
      out.emplace_back(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
      return;
    }
    for (const auto& c : letters) {
      w.insert(w.begin(), c);
      Word head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(std::min(ws, w.size())));
      if (in_language(p, head)) dfs(depth + 1);
      w.erase(w.begin());
    }
  };
  dfs(0);
  std::sort(out.begin(), out.end());
  return explicit_result(std::move(out), search_complete(p, bound), bound);
}

FollowerResult follower_set(const ShiftPresentation& p, const Word& a, std::size_t k, std::size_t bound) {
  if (k == 0) throw Error(Errc::ValidationError, "follower length must be >= 1");
  require_language(p, a);
  return std::visit(
      [&](const auto& b) -> FollowerResult {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, FullShift>) {
          GroupPtr bg = block_parent(p.alphabet, k);
          return coset_result(Coset{bg->identity(), whole_of(bg)}, false);
        } else if constexpr (std::is_same_v<T, MarkovCoset>) {
          Word rep;
          Element cur = a.back();
          for (std::size_t j = 0; j < k; ++j) {
            cur = b.f->apply(cur);
            rep.push_back(cur);
          }
          return coset_result(canonicalize(Coset{flatten(rep), markov_follower_chain(p.alphabet, b, k)}), k > 1);
        } else if constexpr (std::is_same_v<T, PredicateMStep>) {
          if (b.follower) return coset_result(b.follower(a, k), false);
          return bounded_followers(p, a, k, bound);
        } else if constexpr (std::is_same_v<T, EdgeGraph>) {
          return bounded_followers(p, a, k, std::max(bound, p.alphabet->order().value_or(bound)));
        } else if constexpr (std::is_same_v<T, ProductShift>) {
          auto [l, r] = split_word(a, b.left->alphabet->arity());
          return combine_product(p, follower_set(*b.left, l, k, bound), follower_set(*b.right, r, k, bound), k);
        } else {
          throw Error(Errc::Unsupported, "follower sets of the periodic-points shift");
        }
      },
      p.body);
}

FollowerResult predecessor_set(const ShiftPresentation& p, const Word& a, std::size_t k, std::size_t bound) {
  if (k == 0) throw Error(Errc::ValidationError, "predecessor length must be >= 1");
  require_language(p, a);
  return std::visit(
      [&](const auto& b) -> FollowerResult {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, FullShift>) {
          GroupPtr bg = block_parent(p.alphabet, k);
          return coset_result(Coset{bg->identity(), whole_of(bg)}, false);
        } else if constexpr (std::is_same_v<T, MarkovCoset>) {
          Word rep(k);
          Element cur = a.front();
          for (std::size_t j = k; j-- > 0;) {
            auto pre = b.f->preimage ? b.f->preimage(b.f->codomain->project(cur)) : std::nullopt;
            if (!pre) return bounded_predecessors(p, a, k, bound);
            if (b.f->apply(*pre) != b.f->codomain->project(cur))
              throw Error(Errc::ValidationError, "hom preimage oracle returned a wrong preimage");
            rep[j] = *pre;
            cur = *pre;
          }
          return coset_result(Coset{flatten(rep), markov_predecessor_chain(p.alphabet, b, k)}, k > 1);
        } else if constexpr (std::is_same_v<T, PredicateMStep>) {
          if (b.predecessor) return coset_result(b.predecessor(a, k), false);
          return bounded_predecessors(p, a, k, bound);
        } else if constexpr (std::is_same_v<T, EdgeGraph>) {
          return bounded_predecessors(p, a, k, std::max(bound, p.alphabet->order().value_or(bound)));
        } else if constexpr (std::is_same_v<T, ProductShift>) {
          auto [l, r] = split_word(a, b.left->alphabet->arity());
          return combine_product(p, predecessor_set(*b.left, l, k, bound), predecessor_set(*b.right, r, k, bound), k);
        } else {
          throw Error(Errc::Unsupported, "predecessor sets of the periodic-points shift");
        }
      },
      p.body);
}

Language language(const ShiftPresentation& p, std::size_t n, std::size_t bound) {
  Language out;
  out.bound = bound;
  out.complete = search_complete(p, bound);
  if (n == 0) {
    out.words.push_back({});
    return out;
  }
  auto letters = candidate_letters(p, bound);
  Word w;
  std::function<void()> dfs = [&]() {
    if (w.size() == n) {
      out.words.push_back(w);
      return;
    }
    for (const auto& c : letters) {
      w.push_back(c);
      if (window_ok(p, w, w.size() - 1)) dfs();
      w.pop_back();
    }
  };
  dfs();
  return out;
}

// --------------------------------------------------------- classification

SubgroupPtr identity_follower_subgroup(const ShiftPresentation& p, std::size_t m, std::size_t bound) {
  if (m == 0) return whole_of(p.alphabet);
  Word ones(m, p.alphabet->identity());
  FollowerResult r = follower_set(p, ones, 1, bound);
  if (r.coset) return r.coset->subgroup;
  if (r.complete) return make_finite_subgroup(p.alphabet, r.elements.empty() ? std::vector<Element>{} : [&] {
    std::vector<Element> e;
    for (const auto& w : r.elements) e.push_back(w[0]);
    return e;
  }(), "F1(1^" + std::to_string(m) + ")");
  auto pp = &p;
  return predicate_subgroup(p.alphabet, "F1(1^" + std::to_string(m) + ")", [pp, ones](const Element& b) {
    Word w = ones;
    w.push_back(b);
    return in_language(*pp, w);
  });
}

bool subgroups_agree(const SubgroupHandle& a, const SubgroupHandle& b, std::size_t bound) {
  if (&a == &b) return true;
  if (a.is_finite() && b.is_finite()) return a.elements() == b.elements();
  if (a.is_finite() != b.is_finite() && !a.parent()->is_finite()) return false;
  auto o = a.parent()->order();
  const std::size_t n = o ? *o : bound;
  for (std::size_t i = 0; i < n; ++i) {
    Element e = a.parent()->at(i);
    if (a.contains(e) != b.contains(e)) return false;
  }
  return true;
}

json ClassifyReport::to_json() const {
  json j;
  j["row_finite"] = row_finite;
  j["column_finite"] = column_finite ? json(*column_finite) : json("unknown");
  j["column_certified"] = column_certified;
  if (m_step_stabilized) j["m_step"] = m_step;
  else j["m_step"] = ">=" + std::to_string(m_search_cap);
  j["m_step_stabilized"] = m_step_stabilized;
  j["m_search_cap"] = m_search_cap;
  j["is_edge_shift"] = is_edge_shift;
  j["is_sft"] = is_sft;
  j["letters_infinite"] = letters_infinite;
  j["space_finite"] = space_finite;
  return j;
}

ClassifyReport classify(const ShiftPresentation& p, std::size_t bound, std::size_t m_cap) {
  ClassifyReport r;
  r.m_search_cap = m_cap;
  r.letters_infinite = letters_infinite(p);
  r.space_finite = space_finite(p);
  const bool finite_alpha = !r.letters_infinite;
  if (auto pr = p.product()) {
    auto a = classify(*pr->left, bound, m_cap);
    auto b = classify(*pr->right, bound, m_cap);
    r.row_finite = a.row_finite && b.row_finite;
    if (a.column_finite && b.column_finite) r.column_finite = *a.column_finite && *b.column_finite;
    r.column_certified = a.column_certified && b.column_certified;
    r.m_step = std::max(a.m_step, b.m_step);
    r.m_step_stabilized = a.m_step_stabilized && b.m_step_stabilized;
  } else if (p.is_full() || p.is_periodic_points()) {
    r.row_finite = finite_alpha;
    r.column_finite = finite_alpha;
    r.column_certified = true;
    r.m_step = 0;
    r.m_step_stabilized = !p.is_periodic_points() || *p.alphabet->order() == 1;
    if (p.is_periodic_points()) r.m_step = static_cast<Index>(m_cap);
  } else if (p.edge_graph()) {
    r.row_finite = true;
    r.column_finite = true;
    r.column_certified = true;
    r.m_step = 1;
  } else if (auto mc = p.markov()) {
    r.row_finite = mc->n->is_finite();
    auto ker = markov_kernel(p.alphabet, *mc);
    if (ker->is_finite()) {
      r.column_finite = true;
      r.column_certified = true;
    } else if (!p.alphabet->is_finite() && mc->f->kernel) {
      r.column_finite = false;
      r.column_certified = true;
    }
    r.m_step = subgroups_agree(*mc->n, *whole_of(p.alphabet), bound) ? 0 : 1;
  } else if (auto pm = p.predicate()) {
    r.row_finite = identity_follower_subgroup(p, 1, bound)->is_finite() || finite_alpha;
    if (pm->predecessor) {
      auto pre = predecessor_set(p, Word{p.alphabet->identity()}, 1, bound);
      r.column_finite = pre.coset->subgroup->is_finite() || finite_alpha;
      r.column_certified = true;
    }
    // F_1(1^m) depends on the last m letters only, so the chain is constant past m.
    const std::size_t top = std::min<std::size_t>(m_cap, static_cast<std::size_t>(pm->m) + 1);
    SubgroupPtr prev = identity_follower_subgroup(p, 0, bound);
    Index last_change = 0;
    for (std::size_t m = 1; m <= top; ++m) {
      SubgroupPtr cur = identity_follower_subgroup(p, m, bound);
      if (!subgroups_agree(*prev, *cur, bound)) last_change = static_cast<Index>(m);
      prev = cur;
    }
    r.m_step = last_change;
    r.m_step_stabilized = static_cast<std::size_t>(pm->m) < m_cap;
  }
  r.is_edge_shift = r.m_step_stabilized && r.m_step <= 1;
  r.is_sft = r.m_step_stabilized && (finite_alpha || r.m_step == 0);
  return r;
}

std::optional<Element> source_sink_witness(const ShiftPresentation& p, std::size_t bound) {
  if (p.is_full() || p.is_periodic_points()) return std::nullopt;
  for (const auto& a : candidate_letters(p, bound)) {
    if (auto mc = p.markov()) {
      auto pre = mc->f->preimage ? mc->f->preimage(mc->f->codomain->project(a)) : std::nullopt;
      if (!pre || mc->f->apply(*pre) != mc->f->codomain->project(a)) return a;
      continue;
    }
    if (p.predicate() && p.predicate()->follower && p.predicate()->predecessor) continue;
    if (follower_set(p, {a}, 1, bound).elements.empty() && !follower_set(p, {a}, 1, bound).coset) return a;
    auto pr = predecessor_set(p, {a}, 1, bound);
    if (!pr.coset && pr.elements.empty()) return a;
  }
  return std::nullopt;
}

// ----------------------------------------------------------- higher block

HigherBlock higher_block(const ShiftPtr& p, std::size_t m) {
  if (m == 0) throw Error(Errc::ValidationError, "higher block length must be >= 1");
  if (p->axis != Axis::TwoSided) throw Error(Errc::Unsupported, "higher block codes need a two-sided shift");
  if (!p->markov() && !p->predicate() && !p->is_full())
    throw Error(Errc::Unsupported, "higher block codes need a full, Markov or predicate presentation");
  auto cls = classify(*p);
  if (!cls.m_step_stabilized || cls.m_step > static_cast<Index>(m))
    throw Error(Errc::NotMStep, p->name + " is not " + std::to_string(m) + "-step");
  const GroupPtr g = p->alphabet;
  const std::size_t ar = g->arity();
  HigherBlock out;
  out.forward.name = "block" + std::to_string(m);
  out.forward.memory = static_cast<int>(m) - 1;
  out.forward.rule = [](const std::vector<Letter>& w) -> Letter {
    if (!w.back()) return std::nullopt;
    Word b;
    for (const auto& l : w) b.push_back(*l);
    return flatten(b);
  };
  out.inverse = one_block_code("unblock" + std::to_string(m), [m, ar](const Element& e) {
    return e.slice((m - 1) * ar, ar);
  });
  if (m == 1 && p->markov()) {
    out.shift = p;
    out.forward = identity_code();
    out.inverse = identity_code();
    return out;
  }
  GroupPtr bg = make_block_group(g, m);
  const std::size_t ws = window_size(*p);
  GroupPtr alpha = bg;
  if (ws >= 2 && m >= ws) {
    auto pp = p;
    alpha = make_subgroup_alphabet(predicate_subgroup(bg, "B_" + std::to_string(m), [pp, ar](const Element& e) {
      return in_language(*pp, unflatten(e, ar));
    }));
  }
  SubgroupPtr fol = identity_follower_subgroup(*p, m);
  SubgroupPtr nprime;
  const Word ones(m - 1, g->identity());
  if (fol->is_finite()) {
    std::vector<Element> els;
    for (const auto& f : fol->elements()) {
      Word w = ones;
      w.push_back(f);
      els.push_back(flatten(w));
    }
    nprime = make_finite_subgroup(alpha, els, "1^" + std::to_string(m - 1) + "xF");
  } else {
    auto contains = [fol, ar, m, ones](const Element& e) {
      Word w = unflatten(e, ar);
      return std::equal(ones.begin(), ones.end(), w.begin()) && fol->contains(w[m - 1]);
    };
    std::function<Element(const Element&)> canonical;
    if (fol->has_canonical()) {
      canonical = [fol, ar, m](const Element& e) {
        Word w = unflatten(e, ar);
        w[m - 1] = fol->canonical(w[m - 1]);
        return flatten(w);
      };
    }
    nprime = predicate_subgroup(alpha, "1^" + std::to_string(m - 1) + "xF", contains, canonical);
  }
  auto q = make_quotient(alpha, nprime);
  auto follower_rep = [p](const Word& a) {
    auto r = follower_set(*p, a, 1);
    if (!r.coset) throw Error(Errc::Unsupported, "higher block needs an exact follower oracle");
    return r.coset->rep;
  };
  auto hom = std::make_shared<GroupHom>();
  hom->domain = alpha;
  hom->codomain = q;
  hom->name = "overlap";
  hom->descriptor = {{"kind", "overlap"}, {"len", m}};
  hom->rule = [q, ar, follower_rep](const Element& e) {
    Word w = unflatten(e, ar);
    Element c = follower_rep(w);
    Word next(w.begin() + 1, w.end());
    next.push_back(c);
    return q->project(flatten(next));
  };
  hom->preimage = [p, q, ar](const Element& c) -> std::optional<Element> {
    Word b = unflatten(q->section(c), ar);
    auto r = predecessor_set(*p, b, 1);
    Element first;
    if (r.coset) first = r.coset->rep;
    else if (!r.elements.empty()) first = r.elements.front()[0];
    else return std::nullopt;
    Word a{first};
    a.insert(a.end(), b.begin(), b.end() - 1);
    return flatten(a);
  };
  auto shift = make_markov_coset(alpha, Axis::TwoSided, nprime, hom, p->name + "^[" + std::to_string(m) + "]");
  out.shift = shift;
  return out;
}

}  // namespace shiftforge
