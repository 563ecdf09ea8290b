#include "shiftforge/sequence.hpp"

#include <algorithm>
#include <numeric>

#include "shiftforge/group.hpp"

namespace shiftforge {

const char* axis_name(Axis a) { return a == Axis::OneSided ? "one_sided" : "two_sided"; }

Axis axis_from_string(const std::string& s) {
  if (s == "one_sided") return Axis::OneSided;
  if (s == "two_sided") return Axis::TwoSided;
  throw Error(Errc::ParseError, "unknown axis: " + s);
}

namespace {

Index imod(Index a, Index m) {
  Index r = a % m;
  return r < 0 ? r + m : r;
}

Index ilcm(Index a, Index b) { return std::lcm(a, b); }

Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return w;
}

void require_nonempty(const Word& w, const char* what) {
  if (w.empty()) throw Error(Errc::ValidationError, std::string(what) + " must be nonempty");
}

}  // namespace

Sequence Sequence::empty(Axis axis) {
  Sequence s;
  s.axis_ = axis;
  s.kind_ = Kind::Empty;
  return s;
}

Sequence Sequence::finite(Word word) {
  Sequence s;
  s.axis_ = Axis::OneSided;
  s.kind_ = Kind::Finite;
  s.mid_ = std::move(word);
  s.normalize();
  return s;
}

Sequence Sequence::left_ray(Word left_period, Word left_transient, Index end_index) {
  require_nonempty(left_period, "left_period");
  Sequence s;
  s.axis_ = Axis::TwoSided;
  s.kind_ = Kind::LeftRay;
  s.left_ = std::move(left_period);
  s.mid_ = std::move(left_transient);
  s.base_ = end_index;
  s.normalize();
  return s;
}

Sequence Sequence::infinite(Word transient, Word period) {
  require_nonempty(period, "period");
  Sequence s;
  s.axis_ = Axis::OneSided;
  s.kind_ = Kind::Infinite;
  s.mid_ = std::move(transient);
  s.right_ = std::move(period);
  s.normalize();
  return s;
}

Sequence Sequence::periodic(Word left_period, Word center, Word right_period, Index base_index) {
  require_nonempty(left_period, "left_period");
  require_nonempty(right_period, "right_period");
  Sequence s;
  s.axis_ = Axis::TwoSided;
  s.kind_ = Kind::BiInfinite;
  s.left_ = std::move(left_period);
  s.mid_ = std::move(center);
  s.right_ = std::move(right_period);
  s.base_ = base_index;
  s.normalize();
  return s;
}

Sequence Sequence::constant(Axis axis, const Element& a) {
  if (axis == Axis::OneSided) return infinite({}, {a});
  return periodic({a}, {}, {a}, 0);
}

Index Sequence::length() const {
  switch (kind_) {
    case Kind::Empty: return kNegInf;
    case Kind::Finite: return static_cast<Index>(mid_.size()) - 1;
    case Kind::LeftRay: return base_;
    default: return kPosInf;
  }
}

Letter Sequence::raw_at(Index i) const {
  const Index m = static_cast<Index>(mid_.size());
  switch (kind_) {
    case Kind::Empty: return std::nullopt;
    case Kind::Finite:
      if (i >= 0 && i < m) return mid_[static_cast<std::size_t>(i)];
      return std::nullopt;
    case Kind::LeftRay: {
      if (i > base_) return std::nullopt;
      const Index s = base_ - m + 1;
      if (i >= s) return mid_[static_cast<std::size_t>(i - s)];
      return left_[static_cast<std::size_t>(imod(i - s, static_cast<Index>(left_.size())))];
    }
    case Kind::Infinite:
      if (i < m) return mid_[static_cast<std::size_t>(i)];
      return right_[static_cast<std::size_t>(imod(i - m, static_cast<Index>(right_.size())))];
    case Kind::BiInfinite:
      if (i < base_) return left_[static_cast<std::size_t>(imod(i - base_, static_cast<Index>(left_.size())))];
      if (i < base_ + m) return mid_[static_cast<std::size_t>(i - base_)];
      return right_[static_cast<std::size_t>(imod(i - base_ - m, static_cast<Index>(right_.size())))];
  }
  return std::nullopt;
}

Letter Sequence::at(Index i) const {
  if (axis_ == Axis::OneSided && i < 0)
    throw Error(Errc::IndexOutsideAxis, "negative index on a one-sided sequence");
  return raw_at(i);
}

void Sequence::normalize() {
  switch (kind_) {
    case Kind::Empty:
      left_.clear();
      mid_.clear();
      right_.clear();
      base_ = 0;
      return;
    case Kind::Finite:
      if (mid_.empty()) kind_ = Kind::Empty;
      return;
    case Kind::LeftRay: {
      left_ = primitive_root(left_);
      std::size_t drop = 0;
      while (drop < mid_.size() && mid_[drop] == left_[0]) {
        std::rotate(left_.begin(), left_.begin() + 1, left_.end());
        ++drop;
      }
      mid_.erase(mid_.begin(), mid_.begin() + static_cast<std::ptrdiff_t>(drop));
      return;
    }
    case Kind::Infinite:
      right_ = primitive_root(right_);
      while (!mid_.empty() && mid_.back() == right_.back()) {
        mid_.pop_back();
        std::rotate(right_.begin(), right_.end() - 1, right_.end());
      }
      return;
    case Kind::BiInfinite: {
      left_ = primitive_root(left_);
      right_ = primitive_root(right_);
      const Index pl = static_cast<Index>(left_.size());
      const Index pr = static_cast<Index>(right_.size());
      const Index rs = base_ + static_cast<Index>(mid_.size());
      const Index l = ilcm(pl, pr);
      Index s = base_;
      while (s < rs + l && raw_at(s) == left_[static_cast<std::size_t>(imod(s - base_, pl))]) ++s;
      if (s >= rs + l) {
        Word pattern;
        for (Index j = 0; j < pl; ++j) pattern.push_back(*raw_at(j));
        left_ = pattern;
        right_ = pattern;
        mid_.clear();
        base_ = 0;
        return;
      }
      Index t = rs;
      while (t > s - l && raw_at(t - 1) == right_[static_cast<std::size_t>(imod(t - 1 - rs, pr))]) --t;
      const Index ns = std::max(s, t);
      Word lp, c, rp;
      for (Index j = 0; j < pl; ++j) lp.push_back(*raw_at(s - pl + j));
      for (Index j = s; j < ns; ++j) c.push_back(*raw_at(j));
      for (Index j = 0; j < pr; ++j) rp.push_back(*raw_at(ns + j));
      left_ = std::move(lp);
      mid_ = std::move(c);
      right_ = std::move(rp);
      base_ = s;
      return;
    }
  }
}

bool operator==(const Sequence& a, const Sequence& b) {
  return a.axis_ == b.axis_ && a.kind_ == b.kind_ && a.base_ == b.base_ && a.left_ == b.left_ &&
         a.mid_ == b.mid_ && a.right_ == b.right_;
}

bool operator<(const Sequence& a, const Sequence& b) {
  return std::tie(a.axis_, a.kind_, a.base_, a.left_, a.mid_, a.right_) <
         std::tie(b.axis_, b.kind_, b.base_, b.left_, b.mid_, b.right_);
}

std::string Sequence::str() const {
  switch (kind_) {
    case Kind::Empty: return "Ø";
    case Kind::Finite: return word_str(mid_);
    case Kind::LeftRay:
      return "(" + word_str(left_) + ")^-inf " + word_str(mid_) + " end@" + std::to_string(base_);
    case Kind::Infinite: return word_str(mid_) + " (" + word_str(right_) + ")^inf";
    case Kind::BiInfinite:
      return "(" + word_str(left_) + ")^-inf @" + std::to_string(base_) + " " + word_str(mid_) + " (" +
             word_str(right_) + ")^inf";
  }
  return "?";
}

// ------------------------------------------------------------------ frames

Frame frame_of(const Sequence& x) {
  Frame f;
  f.axis = x.axis();
  f.length = x.length();
  const Index m = static_cast<Index>(x.middle().size());
  switch (x.kind()) {
    case Sequence::Kind::Empty: break;
    case Sequence::Kind::Finite: f.right_start = m; break;
    case Sequence::Kind::LeftRay:
      f.left_start = x.base() - m + 1;
      f.left_period = static_cast<Index>(x.left_period().size());
      f.right_start = x.base() + 1;
      break;
    case Sequence::Kind::Infinite:
      f.right_start = m;
      f.right_period = static_cast<Index>(x.right_period().size());
      break;
    case Sequence::Kind::BiInfinite:
      f.left_start = x.base();
      f.left_period = static_cast<Index>(x.left_period().size());
      f.right_start = x.base() + m;
      f.right_period = static_cast<Index>(x.right_period().size());
      break;
  }
  return f;
}

Frame merge_frames(const Frame& a, const Frame& b) {
  if (a.axis != b.axis) throw Error(Errc::MixedAxis, "sequences on different axes");
  Frame f;
  f.axis = a.axis;
  f.length = std::min(a.length, b.length);
  f.left_start = std::min(a.left_start, b.left_start);
  f.left_period = ilcm(a.left_period, b.left_period);
  f.right_start = std::max(a.right_start, b.right_start);
  f.right_period = ilcm(a.right_period, b.right_period);
  return f;
}

Sequence tabulate(const Frame& f, const std::function<Letter(Index)>& entry) {
  auto get = [&](Index i) -> Element {
    Letter l = entry(i);
    if (!l) throw Error(Errc::ValidationError, "empty letter inside the sequence length");
    return *l;
  };
  if (f.length == kNegInf) return Sequence::empty(f.axis);
  if (f.axis == Axis::OneSided) {
    if (f.length < 0) return Sequence::empty(f.axis);
    if (f.length != kPosInf) {
      Word w;
      for (Index i = 0; i <= f.length; ++i) w.push_back(get(i));
      return Sequence::finite(std::move(w));
    }
    const Index r0 = std::max<Index>(0, f.right_start);
    Word t, p;
    for (Index i = 0; i < r0; ++i) t.push_back(get(i));
    for (Index i = 0; i < f.right_period; ++i) p.push_back(get(r0 + i));
    return Sequence::infinite(std::move(t), std::move(p));
  }
  if (f.length != kPosInf) {
    const Index l0 = std::min(f.left_start, f.length + 1);
    Word lp, lt;
    for (Index j = 0; j < f.left_period; ++j) lp.push_back(get(l0 - f.left_period + j));
    for (Index i = l0; i <= f.length; ++i) lt.push_back(get(i));
    return Sequence::left_ray(std::move(lp), std::move(lt), f.length);
  }
  const Index l0 = f.left_start;
  const Index r0 = std::max(f.right_start, l0);
  Word lp, c, rp;
  for (Index j = 0; j < f.left_period; ++j) lp.push_back(get(l0 - f.left_period + j));
  for (Index i = l0; i < r0; ++i) c.push_back(get(i));
  for (Index j = 0; j < f.right_period; ++j) rp.push_back(get(r0 + j));
  return Sequence::periodic(std::move(lp), std::move(c), std::move(rp), l0);
}

Sequence shift_by(const Sequence& x, Index n) {
  if (x.is_empty()) return x;
  if (x.axis() == Axis::OneSided && n < 0)
    throw Error(Errc::IndexOutsideAxis, "one-sided sequences only shift left");
  Frame f = frame_of(x);
  f.left_start -= n;
  f.right_start -= n;
  if (f.length != kPosInf) f.length -= n;
  if (f.axis == Axis::OneSided) f.right_start = std::max<Index>(0, f.right_start);
  return tabulate(f, [&](Index i) { return x.at(i + n); });
}

Sequence shift(const Sequence& x) { return shift_by(x, 1); }

Sequence map_letters(const Sequence& x, const std::function<Element(const Element&)>& fn) {
  return tabulate(frame_of(x), [&](Index i) -> Letter {
    Letter l = x.at(i);
    if (!l) return std::nullopt;
    return fn(*l);
  });
}

Sequence zip_letters(const Sequence& x, const Sequence& y,
                     const std::function<Element(const Element&, const Element&)>& fn) {
  Frame f = merge_frames(frame_of(x), frame_of(y));
  return tabulate(f, [&](Index i) -> Letter {
    Letter a = x.at(i);
    Letter b = y.at(i);
    if (!a || !b) return std::nullopt;
    return fn(*a, *b);
  });
}

Sequence slide(const Sequence& x, int memory, int anticipation,
               const std::function<Letter(const std::vector<Letter>&)>& rule) {
  if (x.axis() == Axis::OneSided && memory > 0)
    throw Error(Errc::Unsupported, "codes with memory act on two-sided sequences only");
  Frame f = frame_of(x);
  f.left_start -= anticipation;
  f.right_start += memory;
  std::vector<Letter> window(static_cast<std::size_t>(memory + anticipation + 1));
  return tabulate(f, [&](Index i) -> Letter {
    for (int d = -memory; d <= anticipation; ++d) window[static_cast<std::size_t>(d + memory)] = x.at(i + d);
    return rule(window);
  });
}

Sequence product_glue(const Sequence& x, const Sequence& y) {
  return zip_letters(x, y, [](const Element& a, const Element& b) { return Element::concat(a, b); });
}

std::pair<Sequence, Sequence> product_split(const Sequence& x, std::size_t left_arity) {
  auto l = map_letters(x, [&](const Element& e) { return e.slice(0, left_arity); });
  auto r = map_letters(x, [&](const Element& e) { return e.slice(left_arity, e.arity() - left_arity); });
  return {l, r};
}

Sequence project_nonneg(const Sequence& x) {
  if (x.axis() != Axis::TwoSided) throw Error(Errc::MixedAxis, "projection needs a two-sided sequence");
  Frame f = frame_of(x);
  f.axis = Axis::OneSided;
  f.right_start = std::max<Index>(0, f.right_start);
  if (x.is_empty()) return Sequence::empty(Axis::OneSided);
  return tabulate(f, [&](Index i) { return x.at(i); });
}

Sequence identity_word_sequence(Axis axis, const Element& id, Index length) {
  if (length == kNegInf || (axis == Axis::OneSided && length < 0)) return Sequence::empty(axis);
  if (length == kPosInf) return Sequence::constant(axis, id);
  if (axis == Axis::OneSided) return Sequence::finite(Word(static_cast<std::size_t>(length + 1), id));
  return Sequence::left_ray({id}, {}, length);
}

// ------------------------------------------------------------------ blocks

std::pair<Index, Index> window_starts(const Sequence& x, std::size_t n) {
  const Frame f = frame_of(x);
  const Index nn = static_cast<Index>(n);
  Index lo = 0;
  if (f.axis == Axis::TwoSided) lo = f.left_start - nn - f.left_period + 1;
  Index hi = f.length == kPosInf ? std::max(f.right_start, lo) + f.right_period - 1 : f.length + 1;
  return {lo, hi};
}

std::set<LetterBlock> blocks_of(const Sequence& x, std::size_t n, bool include_empty_letter) {
  std::set<LetterBlock> out;
  if (x.is_empty() || n == 0) {
    if (include_empty_letter && n > 0) out.insert(LetterBlock(n));
    return out;
  }
  auto [lo, hi] = window_starts(x, n);
  for (Index j = lo; j <= hi; ++j) {
    LetterBlock b;
    bool clean = true;
    for (Index d = 0; d < static_cast<Index>(n); ++d) {
      b.push_back(x.at(j + d));
      clean = clean && b.back().has_value();
    }
    if (clean || include_empty_letter) out.insert(std::move(b));
  }
  return out;
}

std::set<Word> words_of(const Sequence& x, std::size_t n) {
  std::set<Word> out;
  for (const auto& b : blocks_of(x, n, false)) {
    Word w;
    for (const auto& l : b) w.push_back(*l);
    out.insert(std::move(w));
  }
  return out;
}

bool cylinder_contains(const Cylinder& z, const Sequence& y) {
  if (z.kind == Cylinder::Kind::Complement) {
    for (const auto& b : z.bases) {
      Cylinder basic;
      basic.base = b;
      if (cylinder_contains(basic, y)) return false;
    }
    return true;
  }
  if (z.base.axis() != y.axis()) throw Error(Errc::MixedAxis, "cylinder and sequence axes differ");
  auto excluded = [&](const Letter& l) {
    return l && std::find(z.excluded.begin(), z.excluded.end(), *l) != z.excluded.end();
  };
  if (z.base.is_empty()) {
    if (y.axis() != Axis::OneSided)
      throw Error(Errc::ValidationError, "cylinder with empty base is one-sided only");
    return !excluded(y.at(0));
  }
  if (!z.base.is_finite()) throw Error(Errc::ValidationError, "cylinder base must be finite");
  const Index len = z.base.length();
  const Frame f = merge_frames(frame_of(z.base), frame_of(y));
  const Index lo = f.axis == Axis::OneSided ? 0 : f.left_start - f.left_period;
  for (Index i = lo; i <= len; ++i)
    if (z.base.at(i) != y.at(i)) return false;
  return !excluded(y.at(len + 1));
}

// -------------------------------------------------------------------- json

namespace {

json word_json(const Group& g, const Word& w) {
  json a = json::array();
  for (const auto& e : w) a.push_back(g.encode(e));
  return a;
}

Word word_from(const Group& g, const json& j) {
  if (!j.is_array()) throw Error(Errc::ParseError, "expected word array, got " + j.dump());
  Word w;
  for (const auto& x : j) w.push_back(g.decode(x));
  return w;
}

Index index_from(const json& j) {
  if (!j.is_number_integer()) throw Error(Errc::ParseError, "expected integer index");
  return j.get<Index>();
}

}  // namespace

json sequence_to_json(const Group& g, const Sequence& x) {
  switch (x.kind()) {
    case Sequence::Kind::Empty: return {{"kind", "empty"}};
    case Sequence::Kind::Finite: return {{"kind", "finite"}, {"word", word_json(g, x.middle())}};
    case Sequence::Kind::LeftRay:
      return {{"kind", "left_ray"},
              {"left_period", word_json(g, x.left_period())},
              {"left_transient", word_json(g, x.middle())},
              {"end_index", x.base()}};
    case Sequence::Kind::Infinite:
      return {{"kind", "infinite"},
              {"transient", word_json(g, x.middle())},
              {"period", word_json(g, x.right_period())}};
    case Sequence::Kind::BiInfinite:
      return {{"kind", "periodic"},
              {"left_period", word_json(g, x.left_period())},
              {"center", word_json(g, x.middle())},
              {"right_period", word_json(g, x.right_period())},
              {"base_index", x.base()}};
  }
  return {};
}

Sequence sequence_from_json(const Group& g, Axis axis, const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::ParseError, "sequence needs a kind");
  const std::string k = j.at("kind").get<std::string>();
  auto need = [&](Axis a) {
    if (a != axis) throw Error(Errc::MixedAxis, "sequence kind " + k + " on " + axis_name(axis));
  };
  if (k == "empty") return Sequence::empty(axis);
  if (k == "finite") {
    need(Axis::OneSided);
    return Sequence::finite(word_from(g, j.at("word")));
  }
  if (k == "infinite") {
    need(Axis::OneSided);
    return Sequence::infinite(word_from(g, j.value("transient", json::array())), word_from(g, j.at("period")));
  }
  if (k == "left_ray") {
    need(Axis::TwoSided);
    return Sequence::left_ray(word_from(g, j.at("left_period")),
                              word_from(g, j.value("left_transient", json::array())),
                              index_from(j.at("end_index")));
  }
  if (k == "periodic") {
    need(Axis::TwoSided);
    return Sequence::periodic(word_from(g, j.at("left_period")), word_from(g, j.value("center", json::array())),
                              word_from(g, j.at("right_period")), index_from(j.value("base_index", json(0))));
  }
  throw Error(Errc::ParseError, "unknown sequence kind: " + k);
}

}  // namespace shiftforge
