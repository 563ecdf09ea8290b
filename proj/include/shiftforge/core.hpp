#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace shiftforge {

using Integer = boost::multiprecision::cpp_int;
using json = nlohmann::ordered_json;

enum class Errc {
  MalformedElement,
  MismatchedSubgroup,
  NotNormal,
  NoCanonicalRep,
  IndexOutsideAxis,
  MixedAxis,
  MixedAlphabet,
  BlockNotInLanguage,
  NotMStep,
  ClosureViolation,
  ZeroDivisorDetected,
  NotClosed,
  LawViolation,
  WellDefinednessViolation,
  HNotTrivial,
  NonUniquePreimage,
  DepthExhausted,
  HypothesisViolated,
  ParseError,
  ValidationError,
  Unsupported,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Floor-mod with a non-negative result for positive m.
Integer floor_mod(const Integer& a, const Integer& m);
Integer zigzag(const Integer& n);    // 0,1,-1,2,... -> 0,1,2,3,...
Integer unzigzag(const Integer& k);
Integer cantor_pair(const Integer& a, const Integer& b);
std::pair<Integer, Integer> cantor_unpair(const Integer& k);
std::size_t to_size(const Integer& v);
std::string int_str(const Integer& v);

json integer_to_json(const Integer& v);
Integer integer_from_json(const json& j);

// A group element as a flat tuple of integers. Every group fixes its arity.
class Element {
 public:
  Element() = default;
  Element(std::initializer_list<Integer> c) : c_(c) {}
  explicit Element(std::vector<Integer> c) : c_(std::move(c)) {}

  const std::vector<Integer>& coords() const noexcept { return c_; }
  std::size_t arity() const noexcept { return c_.size(); }
  const Integer& operator[](std::size_t i) const { return c_[i]; }

  Element slice(std::size_t off, std::size_t n) const;
  static Element concat(const Element& a, const Element& b);
  std::string str() const;

  friend bool operator==(const Element& a, const Element& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }
  friend bool operator<(const Element& a, const Element& b) { return a.c_ < b.c_; }

 private:
  std::vector<Integer> c_;
};

// nullopt is the empty letter.
using Letter = std::optional<Element>;
using Word = std::vector<Element>;

std::string word_str(const Word& w);
Element flatten(const Word& w);
Word unflatten(const Element& e, std::size_t arity);

}  // namespace shiftforge
