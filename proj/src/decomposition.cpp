#include "shiftforge/decomposition.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "shiftforge/block_ops.hpp"
#include "shiftforge/sampler.hpp"

namespace shiftforge {

namespace {

const MarkovCoset& markov_of(const ShiftPresentation& p) {
  auto* mc = p.markov();
  if (!mc) throw Error(Errc::Unsupported, p.name + " is not a Markov coset presentation");
  return *mc;
}

bool is_trivial(const SubgroupHandle& h) { return h.is_finite() && h.elements().size() == 1; }

// Image of a finite subgroup under `fn`, inside `target`.
SubgroupPtr image_subgroup(const GroupPtr& target, const SubgroupHandle& n,
                           const std::function<Element(const Element&)>& fn, const std::string& name) {
  std::set<Element> out;
  for (const auto& x : n.elements()) out.insert(fn(x));
  return make_finite_subgroup(target, std::vector<Element>(out.begin(), out.end()), name);
}

void require_onto(const GroupHom& f) {
  const auto& q = *f.codomain;
  if (q.is_finite() && f.domain->is_finite() && *f.domain->order() <= 4096) {
    std::set<Element> img;
    for (const auto& a : f.domain->prefix(*f.domain->order())) img.insert(f.apply(a));
    if (img.size() != *q.order())
      throw Error(Errc::Unsupported, "rule " + f.name + " does not reach every follower class");
    return;
  }
  for (const auto& c : q.prefix(64)) {
    auto a = f.preimage(c);
    if (!a || f.apply(*a) != c)
      throw Error(Errc::Unsupported, "rule " + f.name + " has no preimage for " + q.label(c));
  }
}

// Kernel of a derived rule: finite when the alphabet is, or built from a finite parent kernel.
SubgroupPtr derived_kernel(const GroupPtr& dom, const std::function<bool(const Element&)>& in_ker,
                           const std::function<std::vector<Element>()>& from_parent) {
  if (dom->is_finite() && *dom->order() <= 4096) return make_predicate_subgroup(dom, "ker", in_ker);
  if (from_parent) {
    auto e = from_parent();
    if (!e.empty()) return make_finite_subgroup(dom, e, "ker");
  }
  return nullptr;
}

SlidingCode lift(const SlidingCode& c, std::size_t head) {
  SlidingCode out;
  out.name = c.name;
  out.memory = c.memory;
  out.anticipation = c.anticipation;
  auto rule = c.rule;
  const auto mem = static_cast<std::size_t>(c.memory);
  out.rule = [rule, head, mem](const std::vector<Letter>& w) -> Letter {
    const Letter& cur = w[mem];
    if (!cur) return std::nullopt;
    if (cur->arity() == head) return rule(w);
    std::vector<Letter> h(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i]) h[i] = w[i]->slice(0, head);
    Letter r = rule(h);
    if (!r) return std::nullopt;
    return Element::concat(*r, cur->slice(head, cur->arity() - head));
  };
  return out;
}

json order_json(const std::optional<std::size_t>& o) {
  if (o) return *o;
  return "infinite";
}

json subgroup_json(const SubgroupHandle& h) {
  json j{{"name", h.name()}, {"order", order_json(h.order())}};
  if (h.is_finite() && h.elements().size() <= 64) {
    j["elements"] = json::array();
    for (const auto& e : h.elements()) j["elements"].push_back(h.parent()->encode(e));
  } else {
    j["descriptor"] = h.descriptor();
  }
  return j;
}

json seq_json(const Group& g, const Sequence& x) { return sequence_to_json(g, x); }

std::string h_label(const SubgroupHandle& h) {
  if (!h.is_finite()) return h.name() + " (infinite)";
  std::string s = "{";
  for (std::size_t i = 0; i < h.elements().size() && i < 8; ++i) {
    if (i) s += ", ";
    s += h.parent()->label(h.elements()[i]);
  }
  if (h.elements().size() > 8) s += ", ...";
  return s + "}";
}

}  // namespace

Markovized markovize(const ShiftPtr& p) {
  Markovized m;
  m.forward = identity_code();
  m.inverse = identity_code();
  if (p->markov()) {
    m.shift = p;
    return m;
  }
  if (p->is_full()) {
    auto whole = make_whole_subgroup(p->alphabet);
    m.shift = make_markov_coset(p->alphabet, p->axis, whole, hom_projection(p->alphabet, whole), p->name);
    return m;
  }
  if (p->predicate()) {
    auto cls = classify(*p);
    if (!cls.m_step_stabilized) throw Error(Errc::NotMStep, p->name + " did not stabilize");
    m.block = static_cast<std::size_t>(std::max<Index>(1, cls.m_step));
    auto hb = higher_block(p, m.block);
    m.shift = hb.shift;
    m.forward = hb.forward;
    m.inverse = hb.inverse;
    return m;
  }
  throw Error(Errc::Unsupported, p->name + " has no Markov presentation");
}

SubgroupPtr compute_H(const ShiftPresentation& p) {
  const auto& mc = markov_of(p);
  const auto& f = *mc.f;
  if (mc.n->is_finite()) {
    std::vector<Element> e;
    for (const auto& x : mc.n->elements())
      if (f.in_kernel(x)) e.push_back(x);
    return make_finite_subgroup(p.alphabet, e, "H");
  }
  if (f.codomain->order() == std::optional<std::size_t>(1)) return mc.n;
  if (f.kernel && f.kernel->is_finite()) {
    std::vector<Element> e;
    for (const auto& x : f.kernel->elements())
      if (mc.n->contains(x)) e.push_back(x);
    return make_finite_subgroup(p.alphabet, e, "H");
  }
  throw Error(Errc::Unsupported, "N ∩ ker f needs a finite N or a finite kernel");
}

ShiftPtr follower_set_shift(const ShiftPresentation& p) {
  const auto& mc = markov_of(p);
  auto f = mc.f;
  require_onto(*f);
  GroupPtr q = f->codomain;
  SubgroupPtr nbar;
  if (mc.n->is_finite()) {
    nbar = image_subgroup(q, *mc.n, [f](const Element& a) { return f->apply(a); }, "f(N)");
  } else if (q->order() == std::optional<std::size_t>(1)) {
    nbar = make_trivial_subgroup(q);
  } else {
    throw Error(Errc::Unsupported, "f(N) needs a finite N");
  }
  auto cod = make_quotient(q, nbar);
  auto h = std::make_shared<GroupHom>();
  h->domain = q;
  h->codomain = cod;
  h->name = "follower_class";
  h->descriptor = {{"kind", "follower_class"}, {"of", f->descriptor}};
  h->rule = [f, cod](const Element& c) { return cod->project(f->apply(c)); };
  auto qq = f->codomain;
  h->preimage = [f, qq](const Element& c) -> std::optional<Element> {
    auto a = f->preimage(c);
    if (!a) return std::nullopt;
    return qq->project(*a);
  };
  std::function<std::vector<Element>()> from_parent;
  if (f->kernel && f->kernel->is_finite()) {
    auto ker = f->kernel;
    auto g = f->domain;
    from_parent = [f, ker, g, qq, nbar]() {
      std::set<Element> out;
      for (const auto& nb : nbar->elements()) {
        auto a = f->preimage(nb);
        if (!a) continue;
        for (const auto& k : ker->elements()) out.insert(qq->project(g->multiply(*a, k)));
      }
      return std::vector<Element>(out.begin(), out.end());
    };
  }
  h->kernel = derived_kernel(q, [h](const Element& a) { return h->in_kernel(a); }, from_parent);
  return make_markov_coset(q, Axis::TwoSided, nbar, h, p.name + "~");
}

ThetaCode theta_code(const ShiftPtr& p) {
  const auto& mc = markov_of(*p);
  if (p->axis != Axis::TwoSided) throw Error(Errc::Unsupported, "theta needs a two-sided shift");
  auto hh = compute_H(*p);
  if (!is_trivial(*hh)) throw Error(Errc::HNotTrivial, "N ∩ ker f has " + h_label(*hh));
  ThetaCode out;
  out.image = follower_set_shift(*p);
  auto f = mc.f;
  auto g = p->alphabet;
  auto q = f->codomain;
  out.forward = one_block_code("theta", [f](const Element& a) { return f->apply(a); });
  std::function<std::vector<Element>(const Element&, const Element&)> solve;
  if (mc.n->is_finite()) {
    auto n = mc.n;
    solve = [n, g, f](const Element& r, const Element& target) {
      std::vector<Element> hits;
      for (const auto& x : n->elements()) {
        Element a = g->multiply(r, x);
        if (f->apply(a) == target) hits.push_back(a);
      }
      return hits;
    };
  } else if (f->kernel && f->kernel->is_finite()) {
    auto ker = f->kernel;
    solve = [ker, g, f, q](const Element& r, const Element& target) {
      std::vector<Element> hits;
      auto a0 = f->preimage(target);
      if (!a0) return hits;
      for (const auto& k : ker->elements()) {
        Element a = g->multiply(*a0, k);
        if (q->project(a) == r) hits.push_back(a);
      }
      return hits;
    };
  } else {
    throw Error(Errc::Unsupported, "theta inverse needs a finite N or a finite kernel");
  }
  out.inverse.name = "theta^-1";
  out.inverse.memory = 1;
  out.inverse.rule = [solve, q](const std::vector<Letter>& w) -> Letter {
    if (!w[1]) return std::nullopt;
    if (!w[0]) throw Error(Errc::NonUniquePreimage, "no left context for " + q->label(*w[1]));
    auto hits = solve(*w[0], *w[1]);
    if (hits.size() != 1)
      throw Error(Errc::NonUniquePreimage, std::to_string(hits.size()) + " letters in " + q->label(*w[0]) +
                                               " lead to " + q->label(*w[1]));
    return hits.front();
  };
  return out;
}

HatShift hat_shift(const ShiftPtr& p) {
  const auto& mc = markov_of(*p);
  HatShift out;
  out.h = compute_H(*p);
  const GroupPtr g = p->alphabet;
  auto q = make_quotient(g, out.h);
  out.quotient = q;
  out.h_alphabet = make_subgroup_alphabet(out.h);
  SubgroupPtr nhat;
  if (mc.n->is_finite()) {
    nhat = image_subgroup(q, *mc.n, [q](const Element& a) { return q->project(a); }, "N/H");
  } else if (out.h.get() == mc.n.get()) {
    nhat = make_trivial_subgroup(q);
  } else {
    throw Error(Errc::Unsupported, "N/H needs a finite N");
  }
  auto cod = make_quotient(q, nhat);
  auto f = mc.f;
  auto h = std::make_shared<GroupHom>();
  h->domain = q;
  h->codomain = cod;
  h->name = "hat";
  h->descriptor = {{"kind", "hat"}, {"of", f->descriptor}};
  h->rule = [f, q, cod](const Element& c) { return cod->project(q->project(f->apply(c))); };
  h->preimage = [f, q](const Element& c) -> std::optional<Element> {
    auto a = f->preimage(f->codomain->project(c));
    if (!a) return std::nullopt;
    return q->project(*a);
  };
  std::function<std::vector<Element>()> from_parent;
  if (f->kernel && f->kernel->is_finite()) {
    auto ker = f->kernel;
    from_parent = [ker, q]() {
      std::set<Element> out;
      for (const auto& k : ker->elements()) out.insert(q->project(k));
      return std::vector<Element>(out.begin(), out.end());
    };
  }
  h->kernel = derived_kernel(q, [h](const Element& a) { return h->in_kernel(a); }, from_parent);
  out.hat = make_markov_coset(q, Axis::TwoSided, nhat, h, p->name + "^");
  return out;
}

PhiCode phi_code(const ShiftPtr& p) {
  if (p->axis != Axis::TwoSided) throw Error(Errc::Unsupported, "phi needs a two-sided shift");
  PhiCode out;
  out.hat = hat_shift(p);
  auto q = out.hat.quotient;
  const GroupPtr g = p->alphabet;
  const std::size_t ar = g->arity();
  out.star_alphabet = make_section_product(q);
  out.forward = one_block_code("phi", [q, g](const Element& a) {
    Element c = q->project(a);
    return Element::concat(c, g->multiply(g->inverse(q->section(c)), a));
  });
  out.inverse = one_block_code("phi^-1", [q, g, ar](const Element& e) {
    return g->multiply(q->section(e.slice(0, ar)), e.slice(ar, ar));
  });
  auto img = std::make_shared<ShiftPresentation>();
  img->name = out.hat.hat->name + "⊠H";
  img->alphabet = out.star_alphabet;
  img->axis = Axis::TwoSided;
  auto full = make_full_shift(out.hat.h_alphabet, Axis::TwoSided);
  img->body = ProductShift{out.hat.hat, full};
  img->descriptor = {{"kind", "product"}, {"axis", "two_sided"},
                     {"factors", {out.hat.hat->descriptor, full->descriptor}}};
  out.image = img;
  if (q->is_finite() && *q->order() <= 64) {
    out.section = json::array();
    for (const auto& c : q->prefix(*q->order()))
      out.section.push_back({{"coset", q->label(c)}, {"rep", g->encode(q->section(c))}});
  } else {
    out.section = {{"rule", "least element of each coset in the enumeration order"}};
  }
  return out;
}

// ------------------------------------------------------------- fractality

const char* fractal_kind_name(FractalReport::Kind k) {
  switch (k) {
    case FractalReport::Kind::Fractal: return "Fractal";
    case FractalReport::Kind::SelfSimilar: return "SelfSimilarAtLevel";
    case FractalReport::Kind::NonFractal: return "NonFractal";
  }
  return "?";
}

json FractalReport::to_json() const {
  json j{{"kind", fractal_kind_name(kind)}};
  if (kind == Kind::SelfSimilar) j["level"] = level;
  if (kind == Kind::NonFractal) {
    j["stage"] = level;
    j["h_order"] = order_json(h_order);
  }
  j["depth"] = depth;
  j["signature_bound"] = signature_bound;
  j["stages"] = stages;
  return j;
}

bool same_stage_data(const ShiftPresentation& a, const ShiftPresentation& b, std::size_t bound) {
  const auto& ma = markov_of(a);
  const auto& mb = markov_of(b);
  if (a.alphabet->order() != b.alphabet->order()) return false;
  if (ma.n->order() != mb.n->order()) return false;
  auto pa = a.alphabet->prefix(bound);
  auto pb = b.alphabet->prefix(bound);
  if (pa.size() != pb.size()) return false;
  std::map<Element, std::size_t> ia, ib;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    ia[pa[i]] = i;
    ib[pb[i]] = i;
  }
  auto idx = [](const std::map<Element, std::size_t>& m, const Element& e) -> long {
    auto it = m.find(e);
    return it == m.end() ? -1 : static_cast<long>(it->second);
  };
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pa.size(); ++j) {
      if (transition_allowed(a, pa[i], pa[j]) != transition_allowed(b, pb[i], pb[j])) return false;
      if (idx(ia, a.alphabet->multiply(pa[i], pa[j])) != idx(ib, b.alphabet->multiply(pb[i], pb[j])))
        return false;
    }
  return true;
}

FractalReport is_fractal(const ShiftPtr& p, std::size_t depth, std::size_t signature_bound) {
  FractalReport r;
  r.depth = depth;
  r.signature_bound = signature_bound;
  ShiftPtr cur = p;
  ShiftPtr prev;
  for (std::size_t n = 0;; ++n) {
    const auto& mc = markov_of(*cur);
    auto h = compute_H(*cur);
    r.stages.push_back({{"stage", n},
                        {"alphabet_order", order_json(cur->alphabet->order())},
                        {"n_order", order_json(mc.n->order())},
                        {"h_order", order_json(h->order())}});
    if (!is_trivial(*h)) {
      r.kind = FractalReport::Kind::NonFractal;
      r.level = n;
      r.h_order = h->order();
      return r;
    }
    // Singleton follower classes: every later stage is this one relabelled.
    if (is_trivial(*mc.n)) {
      r.kind = FractalReport::Kind::Fractal;
      r.level = n;
      return r;
    }
    if (prev && same_stage_data(*prev, *cur, signature_bound)) {
      r.kind = FractalReport::Kind::SelfSimilar;
      r.level = n;
      return r;
    }
    if (n >= depth)
      throw Error(Errc::DepthExhausted, "H^[n] trivial for every n <= " + std::to_string(depth) +
                                            " without a repeated stage");
    prev = cur;
    cur = follower_set_shift(*cur);
  }
}

// ------------------------------------------------------------ verification

json StageCheck::to_json() const {
  return {{"samples", samples}, {"pairs", pairs}, {"roundtrip", roundtrip}, {"image", image},
          {"length", length},   {"shift", shift}, {"op", op},               {"witnesses", witnesses}};
}

StageCheck check_stage(const StageRecord& s, const std::vector<Sequence>& xs, std::size_t pairs, Exec exec) {
  StageCheck c;
  c.samples = xs.size();
  const Group& before = *s.before->alphabet;
  const Group& after = *s.op_alphabet;
  struct One {
    bool roundtrip = true, image = true, length = true, shift = true;
  };
  auto ones = run_indexed<One>(xs.size(), exec, [&](std::size_t i) {
    One o;
    const Sequence& x = xs[i];
    Sequence y = s.forward(x);
    o.roundtrip = s.inverse(y) == x;
    o.image = contains(*s.image, y);
    o.length = y.length() == x.length();
    o.shift = s.forward(shift(x)) == shift(y);
    return o;
  });
  for (std::size_t i = 0; i < ones.size(); ++i) {
    const auto& o = ones[i];
    if (!o.roundtrip) ++c.roundtrip;
    if (!o.image) ++c.image;
    if (!o.length) ++c.length;
    if (!o.shift) ++c.shift;
    if ((!o.roundtrip || !o.image || !o.length || !o.shift) && c.witnesses.size() < 4)
      c.witnesses.push_back({{"x", seq_json(before, xs[i])}});
  }
  if (xs.empty()) return c;
  c.pairs = pairs;
  auto ops = run_indexed<char>(pairs, exec, [&](std::size_t i) -> char {
    const Sequence& x = xs[i % xs.size()];
    const Sequence& z = xs[(i * 7 + 3) % xs.size()];
    return s.forward(apply_op(before, x, z)) == apply_op(after, s.forward(x), s.forward(z));
  });
  for (std::size_t i = 0; i < ops.size(); ++i)
    if (!ops[i]) {
      ++c.op;
      if (c.witnesses.size() < 8)
        c.witnesses.push_back({{"op_x", seq_json(before, xs[i % xs.size()])},
                               {"op_y", seq_json(before, xs[(i * 7 + 3) % xs.size()])}});
    }
  return c;
}

Sequence DecompositionResult::star(const Sequence& x, const Sequence& y) const {
  return forward(apply_op(*input->alphabet, inverse(x), inverse(y)));
}

json CompositeCheck::to_json() const {
  return {{"exhaustive", exhaustive}, {"transient", transient}, {"period", period},
          {"sequences", sequences},   {"targets", targets},     {"pairs", pairs},
          {"roundtrip", roundtrip},   {"image", image},         {"shift", shift},
          {"surjective", surjective}, {"op", op},               {"head_op", head_op},
          {"witnesses", witnesses}};
}

CompositeCheck verify_composite(const DecompositionResult& r, const DecomposeOptions& opt) {
  CompositeCheck c;
  c.transient = opt.transient;
  c.period = opt.period;
  const auto& in = *r.input;
  const auto& tg = *r.target;
  const bool finite = in.alphabet->is_finite() && tg.alphabet->is_finite();
  c.exhaustive = finite;
  std::vector<Sequence> xs, ts, ps;
  if (finite) {
    xs = enumerate_members(in, opt.transient, opt.period);
    ts = enumerate_members(tg, opt.transient, opt.period);
    ps = enumerate_members(in, opt.pair_transient, opt.pair_period);
  } else {
    xs = sample_sequences(in, opt.samples, opt.seed);
    ts = sample_sequences(tg, opt.samples, opt.seed ^ 0x5bd1e995ULL);
    ps = xs;
  }
  c.sequences = xs.size();
  c.targets = ts.size();
  const std::size_t ha = in.alphabet->arity();
  const Group& head = *r.fractal->alphabet;
  // F x and F^-1 F x, kept for the pair checks.
  struct One {
    Sequence y = Sequence::empty(Axis::TwoSided);
    Sequence back = Sequence::empty(Axis::TwoSided);
    bool image = true, shift = true;
  };
  auto image_of = [&](const std::vector<Sequence>& src) {
    return run_indexed<One>(src.size(), opt.exec, [&](std::size_t i) {
      One o;
      o.y = r.forward(src[i]);
      o.back = r.inverse(o.y);
      o.image = contains(tg, o.y);
      o.shift = r.forward(shift(src[i])) == shift(o.y);
      return o;
    });
  };
  auto ones = image_of(xs);
  for (std::size_t i = 0; i < ones.size(); ++i) {
    const bool rt = ones[i].back == xs[i];
    c.roundtrip += !rt;
    c.image += !ones[i].image;
    c.shift += !ones[i].shift;
    if ((!rt || !ones[i].image || !ones[i].shift) && c.witnesses.size() < 4)
      c.witnesses.push_back({{"x", seq_json(*in.alphabet, xs[i])}});
  }
  // A target already hit by a round-tripping x needs no further work.
  std::set<Sequence> hit;
  for (std::size_t i = 0; i < ones.size(); ++i)
    if (ones[i].back == xs[i]) hit.insert(ones[i].y);
  auto onto = run_indexed<char>(ts.size(), opt.exec, [&](std::size_t i) -> char {
    if (hit.count(ts[i])) return 1;
    Sequence x = r.inverse(ts[i]);
    return contains(in, x) && r.forward(x) == ts[i];
  });
  for (std::size_t i = 0; i < onto.size(); ++i)
    if (!onto[i]) {
      ++c.surjective;
      if (c.witnesses.size() < 8) c.witnesses.push_back({{"target", seq_json(*tg.alphabet, ts[i])}});
    }
  // Every pair of the small set, then seeded pairs of the large one.
  auto small = finite ? image_of(ps) : ones;
  std::vector<std::pair<const One*, const One*>> jobs;
  std::vector<std::pair<const Sequence*, const Sequence*>> src;
  if (ps.size() * ps.size() <= 250000)
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j) {
        jobs.emplace_back(&small[i], &small[j]);
        src.emplace_back(&ps[i], &ps[j]);
      }
  std::mt19937_64 rng(opt.seed);
  for (std::size_t k = 0; k < opt.pairs && !xs.empty(); ++k) {
    std::uniform_int_distribution<std::size_t> d(0, xs.size() - 1);
    std::size_t a = d(rng), b = d(rng);
    jobs.emplace_back(&ones[a], &ones[b]);
    src.emplace_back(&xs[a], &xs[b]);
  }
  c.pairs = jobs.size();
  auto head_of = [ha](const Sequence& s) {
    return map_letters(s, [ha](const Element& e) { return e.slice(0, ha); });
  };
  auto ops = run_indexed<int>(jobs.size(), opt.exec, [&](std::size_t k) -> int {
    const auto& [ox, oy] = jobs[k];
    const Sequence xy = apply_op(*in.alphabet, *src[k].first, *src[k].second);
    const Sequence lhs = r.forward(xy);
    int bad = 0;
    // x ⋆ y = F(F^-1 Fx • F^-1 Fy); F is a function, so equal arguments give equal values.
    const Sequence inner = apply_op(*in.alphabet, ox->back, oy->back);
    if (inner != xy && r.forward(inner) != lhs) bad |= 1;
    if (head_of(lhs) != apply_op(head, head_of(ox->y), head_of(oy->y))) bad |= 2;
    return bad;
  });
  for (std::size_t k = 0; k < ops.size(); ++k) {
    if (ops[k] & 1) ++c.op;
    if (ops[k] & 2) ++c.head_op;
    if (ops[k] && c.witnesses.size() < 8)
      c.witnesses.push_back(
          {{"op_x", seq_json(*in.alphabet, *src[k].first)}, {"op_y", seq_json(*in.alphabet, *src[k].second)}});
  }
  return c;
}

// ------------------------------------------------------------- decompose

DecompositionResult decompose(const ShiftPtr& p, const DecomposeOptions& opt) {
  if (p->axis != Axis::TwoSided) throw Error(Errc::Unsupported, "decomposition needs a two-sided shift");
  DecompositionResult r;
  r.markov = markovize(p);
  ShiftPtr cur = r.markov.shift;
  r.input = cur;
  const auto& mc0 = markov_of(*cur);
  if (auto w = hom_witness(*mc0.f, 32))
    throw Error(Errc::ClosureViolation, "transition rule is not a homomorphism at (" +
                                            cur->alphabet->label(w->first) + ", " +
                                            cur->alphabet->label(w->second) + ")");
  const std::size_t ar = cur->alphabet->arity();
  r.forward = identity_code();
  r.inverse = identity_code();
  auto add_theta = [&](std::size_t step) {
    auto tc = theta_code(cur);
    StageRecord s{StageRecord::Kind::Theta, cur, tc.image, tc.forward, tc.inverse, tc.image->alphabet, tc.image,
                  cur->alphabet->order(), tc.image->alphabet->order(), std::nullopt};
    r.forward = compose(r.forward, lift(tc.forward, ar));
    r.inverse = compose(lift(tc.inverse, ar), r.inverse);
    r.trace.push_back("step " + std::to_string(step) + ": theta onto the follower-set shift (" +
                      (tc.image->alphabet->is_finite() ? std::to_string(*tc.image->alphabet->order()) + " letters"
                                                       : std::string("infinitely many letters")) +
                      ")");
    r.stages.push_back(std::move(s));
    cur = tc.image;
    ++r.theta_steps;
  };
  for (std::size_t step = 0;; ++step) {
    if (step > opt.depth) throw Error(Errc::DepthExhausted, "no fractal head within " + std::to_string(opt.depth) + " steps");
    auto h = compute_H(*cur);
    if (is_trivial(*h)) {
      auto fr = is_fractal(cur, opt.depth);
      if (fr.kind != FractalReport::Kind::NonFractal) {
        r.fractal_report = fr;
        r.trace.push_back("step " + std::to_string(step) + ": head is " + fractal_kind_name(fr.kind) +
                          (fr.kind == FractalReport::Kind::SelfSimilar ? " " + std::to_string(fr.level) : ""));
        break;
      }
      add_theta(step);
      continue;
    }
    auto pc = phi_code(cur);
    r.trace.push_back("step " + std::to_string(step) + ": H = " + h_label(*pc.hat.h) + ", phi onto (G/H) ⊠ H");
    StageRecord s{StageRecord::Kind::Phi, cur, pc.image, pc.forward, pc.inverse, pc.star_alphabet, pc.image,
                  cur->alphabet->order(), pc.hat.quotient->order(), pc.hat.h->order()};
    if (s.g_order && s.quotient_order && s.h_order)
      r.lagrange.push_back({{"step", step},
                            {"g", *s.g_order},
                            {"quotient", *s.quotient_order},
                            {"h", *s.h_order},
                            {"holds", *s.g_order == *s.quotient_order * *s.h_order}});
    r.stages.push_back(std::move(s));
    r.sections.push_back({{"step", step}, {"section", pc.section}});
    r.forward = compose(r.forward, lift(pc.forward, ar));
    r.inverse = compose(lift(pc.inverse, 2 * ar), r.inverse);
    r.h_list.push_back(pc.hat.h);
    r.h_alphabets.push_back(pc.hat.h_alphabet);
    ++r.phi_steps;
    cur = pc.hat.hat;
    if (!is_trivial(*compute_H(*cur)))
      throw Error(Errc::LawViolation, "H of the quotient shift is not trivial");
    add_theta(step);
  }
  r.fractal = cur;
  if (r.h_alphabets.empty()) {
    r.target = cur;
  } else {
    std::vector<GroupPtr> hs(r.h_alphabets.rbegin(), r.h_alphabets.rend());
    GroupPtr b = hs.size() == 1 ? hs.front() : make_product(hs);
    r.target = product_shift(cur, make_full_shift(b, Axis::TwoSided));
  }
  if (opt.verify) {
    for (std::size_t i = 0; i < r.stages.size(); ++i) {
      const auto& s = r.stages[i];
      auto xs = sample_sequences(*s.before, opt.samples, opt.seed + i);
      r.stage_checks.push_back(check_stage(s, xs, opt.samples, opt.exec));
    }
    r.composite = verify_composite(r, opt);
  }
  return r;
}

json DecompositionResult::to_json(bool include_checks) const {
  const auto& mf = markov_of(*fractal);
  json fj{{"name", fractal->name},
          {"alphabet", fractal->alphabet->describe()},
          {"alphabet_order", order_json(fractal->alphabet->order())},
          {"subgroup", subgroup_json(*mf.n)}};
  if (fractal->alphabet->is_finite() && *fractal->alphabet->order() <= 64) {
    bool ident = is_trivial(*mf.n);
    json rule = json::array();
    for (const auto& c : fractal->alphabet->prefix(*fractal->alphabet->order())) {
      Element fc = mf.f->apply(c);
      ident = ident && mf.f->codomain->project(c) == fc;
      rule.push_back(json::array({fractal->alphabet->encode(c), fractal->alphabet->encode(fc)}));
    }
    fj["rule"] = rule;
    fj["identity_transitions"] = ident;
  }
  fj["report"] = fractal_report.to_json();
  json hl = json::array();
  for (const auto& h : h_list) hl.push_back(subgroup_json(*h));
  json book{{"input_order", order_json(input->alphabet->order())},
            {"fractal_order", order_json(fractal->alphabet->order())}};
  bool all_finite = input->alphabet->is_finite() && fractal->alphabet->is_finite();
  std::size_t prod = all_finite ? *fractal->alphabet->order() : 0;
  json ho = json::array();
  for (const auto& h : h_list) {
    ho.push_back(order_json(h->order()));
    if (h->order()) prod *= *h->order();
    else all_finite = false;
  }
  book["h_orders"] = ho;
  if (all_finite) {
    book["product"] = prod;
    book["holds"] = prod == *input->alphabet->order();
  }
  json j{{"input", {{"name", input->name}, {"alphabet", input->alphabet->describe()}, {"shift", input->descriptor}}},
         {"markov_block", markov.block},
         {"fractal", fj},
         {"h_list", hl},
         {"alphabet_bookkeeping", book},
         {"phi_steps", phi_steps},
         {"theta_steps", theta_steps},
         {"forward", {{"memory", forward.memory}, {"anticipation", forward.anticipation}}},
         {"inverse", {{"memory", inverse.memory}, {"anticipation", inverse.anticipation}}},
         {"sections", sections},
         {"lagrange", lagrange},
         {"trace", trace}};
  if (include_checks) {
    json sc = json::array();
    for (std::size_t i = 0; i < stage_checks.size(); ++i) {
      json s = stage_checks[i].to_json();
      s["kind"] = stages[i].kind == StageRecord::Kind::Phi ? "phi" : "theta";
      sc.push_back(s);
    }
    j["stage_checks"] = sc;
    j["composite"] = composite.to_json();
  }
  return j;
}

}  // namespace shiftforge
