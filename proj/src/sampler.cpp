#include "shiftforge/sampler.hpp"

#include <set>

namespace shiftforge {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<Element> usable_letters(const ShiftPresentation& p, const SampleCaps& caps) {
  std::vector<Element> out;
  for (auto& e : p.alphabet->prefix(caps.letters))
    if (letter_in_alphabet(p, e)) out.push_back(std::move(e));
  if (out.empty()) throw Error(Errc::ValidationError, "no usable letters among the first " + std::to_string(caps.letters));
  return out;
}

// Extends w by up to n admissible letters; stops early at a dead end.
void random_walk(const ShiftPresentation& p, const std::vector<Element>& letters, Word& w, std::size_t n,
                 std::mt19937_64& rng) {
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<const Element*> next;
    for (const auto& c : letters) {
      w.push_back(c);
      if (last_window_allowed(p, w)) next.push_back(&c);
      w.pop_back();
    }
    if (next.empty()) return;
    w.push_back(*next[uniform(rng, 0, next.size() - 1)]);
  }
}

Word random_word(const std::vector<Element>& letters, std::size_t n, std::mt19937_64& rng) {
  Word w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(letters[uniform(rng, 0, letters.size() - 1)]);
  return w;
}

Index random_base(std::mt19937_64& rng) { return static_cast<Index>(uniform(rng, 0, 6)) - 3; }

Word context_of(const Word& cycle, std::size_t width) {
  Word ctx;
  while (ctx.size() < width + cycle.size()) ctx.insert(ctx.end(), cycle.begin(), cycle.end());
  return ctx;
}

std::optional<Sequence> two_sided_candidate(const ShiftPresentation& p, const std::vector<Element>& letters,
                                            std::mt19937_64& rng, const SampleCaps& caps) {
  const std::size_t width = window_size(p);
  const std::size_t roll = uniform(rng, 0, 99);
  if (roll < 5) return Sequence::empty(Axis::TwoSided);
  if (width <= 1) {
    Word l = random_word(letters, uniform(rng, 1, caps.period), rng);
    Word c = random_word(letters, uniform(rng, 0, caps.transient), rng);
    if (roll < 20) return Sequence::left_ray(l, c, random_base(rng));
    return Sequence::periodic(l, c, random_word(letters, uniform(rng, 1, caps.period), rng), random_base(rng));
  }
  Word cycle = sample_cycle(p, rng, caps);
  Word w = context_of(cycle, width);
  const std::size_t ctx = w.size();
  random_walk(p, letters, w, uniform(rng, roll < 20 ? 1 : 0, caps.transient), rng);
  Word center(w.begin() + static_cast<std::ptrdiff_t>(ctx), w.end());
  const Index base = random_base(rng);
  if (roll < 20) {
    if (center.empty()) return std::nullopt;
    return Sequence::left_ray(cycle, center, base + static_cast<Index>(center.size()) - 1);
  }
  for (int attempt = 0; attempt < 32; ++attempt) {
    Word u = w;
    random_walk(p, letters, u, uniform(rng, 1, caps.period), rng);
    Word right(u.begin() + static_cast<std::ptrdiff_t>(w.size()), u.end());
    if (right.empty()) break;
    Sequence x = Sequence::periodic(cycle, center, right, base);
    if (contains(p, x)) return x;
  }
  return Sequence::periodic(cycle, {}, cycle, base);
}

std::optional<Sequence> one_sided_candidate(const ShiftPresentation& p, const std::vector<Element>& letters,
                                            std::mt19937_64& rng, const SampleCaps& caps) {
  const std::size_t width = window_size(p);
  const std::size_t roll = uniform(rng, 0, 99);
  if (roll < 5) return Sequence::empty(Axis::OneSided);
  Word w{letters[uniform(rng, 0, letters.size() - 1)]};
  if (width <= 1) {
    if (roll < 25) return Sequence::finite(random_word(letters, uniform(rng, 1, caps.transient + 2), rng));
    return Sequence::infinite(random_word(letters, uniform(rng, 0, caps.transient), rng),
                              random_word(letters, uniform(rng, 1, caps.period), rng));
  }
  random_walk(p, letters, w, uniform(rng, 0, caps.transient + 1), rng);
  if (roll < 25) return Sequence::finite(w);
  const std::size_t t = uniform(rng, 0, std::min(w.size(), caps.transient));
  Word head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(t));
  Word tail(w.begin() + static_cast<std::ptrdiff_t>(t), w.end());
  for (int attempt = 0; attempt < 32; ++attempt) {
    Word u = head;
    Word seed_tail = tail.empty() ? Word{} : Word(tail.begin(), tail.begin() + 1);
    u.insert(u.end(), seed_tail.begin(), seed_tail.end());
    random_walk(p, letters, u, uniform(rng, 0, caps.period - 1), rng);
    Word period(u.begin() + static_cast<std::ptrdiff_t>(t), u.end());
    if (period.empty()) break;
    Sequence x = Sequence::infinite(head, period);
    if (contains(p, x)) return x;
  }
  return std::nullopt;
}

Sequence fallback(const ShiftPresentation& p) {
  return Sequence::constant(p.axis, p.alphabet->identity());
}

}  // namespace

Word sample_cycle(const ShiftPresentation& p, std::mt19937_64& rng, SampleCaps caps) {
  auto letters = usable_letters(p, caps);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Word u{letters[uniform(rng, 0, letters.size() - 1)]};
    random_walk(p, letters, u, uniform(rng, 0, caps.period - 1), rng);
    if (contains(p, Sequence::periodic(u, {}, u, 0))) return u;
  }
  return {p.alphabet->identity()};
}

std::vector<Sequence> sample_sequences(const ShiftPresentation& p, std::size_t count, std::uint64_t seed,
                                       SampleCaps caps) {
  std::mt19937_64 rng(seed);
  std::vector<Sequence> out;
  if (auto pr = p.product()) {
    auto ls = sample_sequences(*pr->left, count * 2, seed ^ 0x9e3779b97f4a7c15ULL, caps);
    auto rs = sample_sequences(*pr->right, count * 2, seed ^ 0xc2b2ae3d27d4eb4fULL, caps);
    for (std::size_t i = 0; i < ls.size() && out.size() < count; ++i) {
      Sequence x = product_glue(ls[i], rs[i]);
      if (contains(p, x)) out.push_back(std::move(x));
    }
    while (out.size() < count) out.push_back(fallback(p));
    return out;
  }
  auto letters = usable_letters(p, caps);
  for (std::size_t attempt = 0; out.size() < count && attempt < count * 20; ++attempt) {
    auto x = p.axis == Axis::TwoSided ? two_sided_candidate(p, letters, rng, caps)
                                      : one_sided_candidate(p, letters, rng, caps);
    if (x && contains(p, *x)) out.push_back(std::move(*x));
  }
  while (out.size() < count) out.push_back(fallback(p));
  return out;
}

std::vector<Sequence> walk_patterns(const ShiftPresentation& p, std::size_t count, std::uint64_t seed,
                                    std::size_t max_steps, SampleCaps caps) {
  if (p.axis != Axis::TwoSided) throw Error(Errc::MixedAxis, "walk patterns are two-sided");
  std::mt19937_64 rng(seed);
  auto letters = usable_letters(p, caps);
  const std::size_t width = window_size(p);
  std::vector<Sequence> out;
  if (count > 0) out.push_back(Sequence::empty(Axis::TwoSided));
  if (count > 1) out.push_back(fallback(p));
  while (out.size() < count) {
    Word cycle = sample_cycle(p, rng, caps);
    Word w = context_of(cycle, width);
    const std::size_t ctx = w.size();
    const std::size_t steps = uniform(rng, 1, max_steps);
    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t keep = std::max<std::size_t>(1, width - 1);
      Word tail(w.end() - static_cast<std::ptrdiff_t>(std::min(keep, w.size())), w.end());
      FollowerResult f = follower_set(p, tail, 1);
      std::vector<Element> options;
      if (f.coset && f.coset->subgroup->is_finite() && f.coset->subgroup->elements().size() <= 64) {
        const auto& g = *f.coset->subgroup->parent();
        for (const auto& h : f.coset->subgroup->elements()) options.push_back(g.multiply(f.coset->rep, h));
      } else {
        for (const auto& c : letters) {
          w.push_back(c);
          if (last_window_allowed(p, w)) options.push_back(c);
          w.pop_back();
        }
      }
      if (options.empty()) break;
      w.push_back(options[uniform(rng, 0, options.size() - 1)]);
    }
    Word walk(w.begin() + static_cast<std::ptrdiff_t>(ctx), w.end());
    if (walk.empty()) continue;
    out.push_back(Sequence::left_ray(cycle, walk, random_base(rng)));
  }
  return out;
}

namespace {

// All admissible extensions of `ctx` by 0..n letters; returns only the added part.
void extensions(const ShiftPresentation& p, const std::vector<Element>& letters, Word& ctx, std::size_t start,
                std::size_t n, std::vector<Word>& out) {
  out.emplace_back(ctx.begin() + static_cast<std::ptrdiff_t>(start), ctx.end());
  if (n == 0) return;
  for (const auto& c : letters) {
    ctx.push_back(c);
    if (last_window_allowed(p, ctx)) extensions(p, letters, ctx, start, n - 1, out);
    ctx.pop_back();
  }
}

// Windows that wrap from the end of v back into v, for the admissible word w v.
bool wraps_allowed(const ShiftPresentation& p, Word w, const Word& v, std::size_t width) {
  w.insert(w.end(), v.begin(), v.end());
  for (std::size_t i = 0; i + 1 < std::max<std::size_t>(width, 2); ++i) {
    w.push_back(v[i % v.size()]);
    if (!last_window_allowed(p, w)) return false;
  }
  return true;
}

}  // namespace

std::vector<Sequence> enumerate_members(const ShiftPresentation& p, std::size_t transient, std::size_t period) {
  if (!p.alphabet->is_finite()) throw Error(Errc::Unsupported, "exhaustive enumeration needs a finite alphabet");
  std::vector<Element> letters;
  for (auto& e : p.alphabet->prefix(*p.alphabet->order()))
    if (letter_in_alphabet(p, e)) letters.push_back(std::move(e));
  std::set<Sequence> out;
  const Sequence empty = Sequence::empty(p.axis);
  if (contains(p, empty)) out.insert(empty);
  const std::size_t width = window_size(p);
  // Bi-infinite membership is window membership except for periodic-point shifts.
  const bool windowed = !p.is_periodic_points();
  if (p.axis == Axis::OneSided) {
    Word ctx;
    std::vector<Word> heads;
    extensions(p, letters, ctx, 0, transient + 1, heads);
    for (const auto& h : heads) {
      if (!h.empty()) {
        Sequence x = Sequence::finite(h);
        if (contains(p, x)) out.insert(x);
      }
      if (h.size() > transient) continue;
      Word c = h;
      std::vector<Word> tails;
      extensions(p, letters, c, h.size(), period, tails);
      for (const auto& v : tails) {
        if (v.empty()) continue;
        Sequence x = Sequence::infinite(h, v);
        if (contains(p, x)) out.insert(x);
      }
    }
    return std::vector<Sequence>(out.begin(), out.end());
  }
  Word start;
  std::vector<Word> cycles;
  extensions(p, letters, start, 0, period, cycles);
  for (const auto& u : cycles) {
    if (u.empty() || !contains(p, Sequence::periodic(u, {}, u, 0))) continue;
    Word ctx;
    while (ctx.size() < width + u.size()) ctx.insert(ctx.end(), u.begin(), u.end());
    const std::size_t base = ctx.size();
    std::vector<Word> centers;
    extensions(p, letters, ctx, base, transient, centers);
    for (const auto& c : centers) {
      if (!c.empty()) {
        Sequence ray = Sequence::left_ray(u, c, static_cast<Index>(c.size()) - 1);
        if (contains(p, ray)) out.insert(ray);
      }
      Word w = ctx;
      w.insert(w.end(), c.begin(), c.end());
      std::vector<Word> rights;
      extensions(p, letters, w, w.size(), period, rights);
      for (const auto& v : rights) {
        if (v.empty()) continue;
        if (windowed ? wraps_allowed(p, w, v, width) : contains(p, Sequence::periodic(u, c, v, 0)))
          out.insert(Sequence::periodic(u, c, v, 0));
      }
    }
  }
  return std::vector<Sequence>(out.begin(), out.end());
}

}  // namespace shiftforge
