#include "shiftforge/core.hpp"

#include <limits>

namespace shiftforge {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedElement: return "MalformedElement";
    case Errc::MismatchedSubgroup: return "MismatchedSubgroup";
    case Errc::NotNormal: return "NotNormal";
    case Errc::NoCanonicalRep: return "NoCanonicalRep";
    case Errc::IndexOutsideAxis: return "IndexOutsideAxis";
    case Errc::MixedAxis: return "MixedAxis";
    case Errc::MixedAlphabet: return "MixedAlphabet";
    case Errc::BlockNotInLanguage: return "BlockNotInLanguage";
    case Errc::NotMStep: return "NotMStep";
    case Errc::ClosureViolation: return "ClosureViolation";
    case Errc::ZeroDivisorDetected: return "ZeroDivisorDetected";
    case Errc::NotClosed: return "NotClosed";
    case Errc::LawViolation: return "LawViolation";
    case Errc::WellDefinednessViolation: return "WellDefinednessViolation";
    case Errc::HNotTrivial: return "HNotTrivial";
    case Errc::NonUniquePreimage: return "NonUniquePreimage";
    case Errc::DepthExhausted: return "DepthExhausted";
    case Errc::HypothesisViolated: return "HypothesisViolated";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

Integer floor_mod(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

Integer zigzag(const Integer& n) { return n > 0 ? Integer(2 * n - 1) : Integer(-2 * n); }

Integer unzigzag(const Integer& k) {
  if (k % 2 == 1) return Integer((k + 1) / 2);
  return Integer(-(k / 2));
}

Integer cantor_pair(const Integer& a, const Integer& b) {
  Integer s = a + b;
  return s * (s + 1) / 2 + b;
}

std::pair<Integer, Integer> cantor_unpair(const Integer& k) {
  Integer w = (boost::multiprecision::sqrt(Integer(8 * k + 1)) - 1) / 2;
  Integer t = w * (w + 1) / 2;
  Integer b = k - t;
  return {w - b, b};
}

std::size_t to_size(const Integer& v) {
  if (v < 0 || v > Integer(std::numeric_limits<std::size_t>::max()))
    throw Error(Errc::ValidationError, "integer out of range: " + v.str());
  return static_cast<std::size_t>(v);
}

std::string int_str(const Integer& v) { return v.str(); }

json integer_to_json(const Integer& v) {
  if (v >= Integer(std::numeric_limits<std::int64_t>::min()) &&
      v <= Integer(std::numeric_limits<std::int64_t>::max()))
    return json(static_cast<std::int64_t>(v));
  return json(v.str());
}

Integer integer_from_json(const json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Integer(j.get<std::uint64_t>());
    return Integer(j.get<std::int64_t>());
  }
  if (j.is_string()) {
    try {
      return Integer(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw Error(Errc::ParseError, "expected integer, got " + j.dump());
}

Element Element::slice(std::size_t off, std::size_t n) const {
  return Element(std::vector<Integer>(c_.begin() + off, c_.begin() + off + n));
}

Element Element::concat(const Element& a, const Element& b) {
  std::vector<Integer> c = a.c_;
  c.insert(c.end(), b.c_.begin(), b.c_.end());
  return Element(std::move(c));
}

std::string Element::str() const {
  if (c_.size() == 1) return c_[0].str();
  std::string s = "(";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) s += ",";
    s += c_[i].str();
  }
  return s + ")";
}

std::string word_str(const Word& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += " ";
    s += w[i].str();
  }
  return s + "]";
}

Element flatten(const Word& w) {
  std::vector<Integer> c;
  for (const auto& e : w) c.insert(c.end(), e.coords().begin(), e.coords().end());
  return Element(std::move(c));
}

Word unflatten(const Element& e, std::size_t arity) {
  Word w;
  for (std::size_t off = 0; off + arity <= e.arity(); off += arity) w.push_back(e.slice(off, arity));
  return w;
}

}  // namespace shiftforge
