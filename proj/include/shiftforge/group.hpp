#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shiftforge/core.hpp"

namespace shiftforge {

class Group;
class SubgroupHandle;
class QuotientGroup;
using GroupPtr = std::shared_ptr<const Group>;
using SubgroupPtr = std::shared_ptr<const SubgroupHandle>;
using QuotientPtr = std::shared_ptr<const QuotientGroup>;

class Group : public std::enable_shared_from_this<Group> {
 public:
  virtual ~Group() = default;

  virtual std::string kind() const = 0;
  virtual std::size_t arity() const = 0;
  virtual Element identity() const = 0;
  virtual Element multiply(const Element& a, const Element& b) const = 0;
  virtual Element inverse(const Element& a) const = 0;
  virtual bool is_valid(const Element& a) const = 0;
  // nullopt means infinite.
  virtual std::optional<std::size_t> order() const = 0;
  // k-th element of the canonical enumeration; at(0) is the identity.
  virtual Element at(std::size_t k) const = 0;
  // Total order key compatible with the enumeration; identity has ordinal 0.
  virtual Integer ordinal(const Element& a) const = 0;
  virtual bool ordinal_is_index() const { return false; }
  virtual bool is_abelian() const = 0;
  virtual std::vector<Element> generators() const { return {}; }
  virtual json describe() const = 0;
  virtual json encode(const Element& a) const = 0;
  virtual Element decode(const json& j) const = 0;
  virtual std::string label(const Element& a) const { return encode(a).dump(); }

  bool is_finite() const { return order().has_value(); }
  void validate(const Element& a) const;
  std::vector<Element> prefix(std::size_t n) const;
  bool same_as(const Group& other) const;
  Element power(const Element& a, long long n) const;
  bool ordinal_less(const Element& a, const Element& b) const { return ordinal(a) < ordinal(b); }
};

GroupPtr make_cyclic(std::size_t n);
GroupPtr make_symmetric3();
GroupPtr make_integers();
GroupPtr make_integer_pairs();
GroupPtr make_prufer2();
GroupPtr make_product(std::vector<GroupPtr> factors);
GroupPtr make_block_group(GroupPtr base, std::size_t len);
GroupPtr make_table_group(std::string name, std::vector<std::string> names,
                          std::vector<std::vector<std::size_t>> table);
GroupPtr group_from_json(const json& j);

// Product-like groups expose their factors so words can be split and glued.
std::vector<GroupPtr> product_factors(const GroupPtr& g);

// prufer2 helpers: normal form [g,i] stands for g/2^i mod 1.
Element prufer_make(const Integer& g, const Integer& i);
Element prufer_delta(const Element& a);

enum class IndexKind { Finite, Infinite, Unknown };
struct IndexInfo {
  IndexKind kind = IndexKind::Unknown;
  std::size_t value = 0;
};

class SubgroupHandle {
 public:
  struct Spec {
    GroupPtr parent;
    std::string name;
    std::function<bool(const Element&)> contains;
    std::function<Element(const Element&)> canonical;
    std::optional<std::vector<Element>> elements;
    std::function<Element(std::size_t)> enumerate;
    std::vector<Element> generators;
    IndexInfo index;
    bool normal = true;
    json descriptor;
  };

  explicit SubgroupHandle(Spec s);

  const GroupPtr& parent() const noexcept { return s_.parent; }
  const std::string& name() const noexcept { return s_.name; }
  const json& descriptor() const noexcept { return s_.descriptor; }
  bool contains(const Element& a) const { return s_.contains(a); }
  bool is_finite() const noexcept { return s_.elements.has_value(); }
  const std::vector<Element>& elements() const;
  std::optional<std::size_t> order() const;
  bool is_trivial_known() const { return is_finite() && s_.elements->size() == 1; }
  bool has_canonical() const { return is_finite() || static_cast<bool>(s_.canonical); }
  // Canonical representative of the coset a*H.
  Element canonical(const Element& a) const;
  // First n elements of the subgroup in a deterministic order.
  std::vector<Element> prefix(std::size_t n) const;
  const std::vector<Element>& generators() const noexcept { return s_.generators; }
  IndexInfo index() const noexcept { return s_.index; }
  bool is_normal() const noexcept { return s_.normal; }

 private:
  Spec s_;
  struct Memo {
    std::mutex m;
    std::map<Element, Element> table;
  };
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

SubgroupPtr make_finite_subgroup(GroupPtr g, std::vector<Element> elems, std::string name,
                                 json descriptor = json());
SubgroupPtr make_trivial_subgroup(GroupPtr g);
SubgroupPtr make_whole_subgroup(GroupPtr g);
SubgroupPtr make_generated_subgroup(GroupPtr g, std::vector<Element> gens);
SubgroupPtr make_builtin_subgroup(GroupPtr g, const std::string& name);
SubgroupPtr subgroup_from_json(GroupPtr g, const json& j);
// Membership-only subgroup, e.g. follower subgroups of predicate shifts.
SubgroupPtr make_predicate_subgroup(GroupPtr g, std::string name,
                                    std::function<bool(const Element&)> contains,
                                    std::function<Element(const Element&)> canonical = {});

// Returns a witness (g, h) with g h g^-1 not in H, scanning the first `bound` elements.
std::optional<std::pair<Element, Element>> normality_witness(const SubgroupHandle& h,
                                                             std::size_t bound);
std::optional<std::pair<Element, Element>> closure_witness(const SubgroupHandle& h,
                                                           std::size_t bound);

struct Coset {
  Element rep;
  SubgroupPtr subgroup;
};

bool coset_eq(const Coset& a, const Coset& b);
Coset coset_mul(const Coset& a, const Coset& b);
Coset canonicalize(const Coset& c);
bool coset_contains(const Coset& c, const Element& x);

class QuotientGroup : public Group {
 public:
  QuotientGroup(GroupPtr base, SubgroupPtr h);

  std::string kind() const override { return "quotient"; }
  std::size_t arity() const override { return base_->arity(); }
  Element identity() const override { return id_; }
  Element multiply(const Element& a, const Element& b) const override;
  Element inverse(const Element& a) const override;
  bool is_valid(const Element& a) const override;
  std::optional<std::size_t> order() const override { return order_; }
  Element at(std::size_t k) const override;
  Integer ordinal(const Element& a) const override { return base_->ordinal(a); }
  bool is_abelian() const override { return base_->is_abelian(); }
  std::vector<Element> generators() const override;
  json describe() const override;
  json encode(const Element& a) const override { return base_->encode(a); }
  Element decode(const json& j) const override { return project(base_->decode(j)); }
  std::string label(const Element& a) const override;

  const GroupPtr& base() const noexcept { return base_; }
  const SubgroupPtr& subgroup() const noexcept { return h_; }
  Element project(const Element& a) const { return h_->canonical(a); }
  // The section: canonical representative, minimal in its coset.
  Element section(const Element& c) const { return c; }

 private:
  GroupPtr base_;
  SubgroupPtr h_;
  Element id_;
  std::optional<std::size_t> order_;
  mutable std::mutex mu_;
  mutable std::vector<Element> seen_;
  mutable std::set<Element> seen_set_;
  mutable std::size_t cursor_ = 0;
};

QuotientPtr make_quotient(GroupPtr g, SubgroupPtr h);
// Group whose elements are those of a subgroup, with the parent's encoding.
GroupPtr make_subgroup_alphabet(SubgroupPtr h);
// Elements (c, h) of Q x K standing for section(c) * h, with the transported product.
GroupPtr make_section_product(QuotientPtr q);

struct GroupHom {
  GroupPtr domain;
  QuotientPtr codomain;
  std::string name;
  json descriptor;
  std::function<Element(const Element&)> rule;
  std::function<std::optional<Element>(const Element&)> preimage;
  SubgroupPtr kernel;

  Element apply(const Element& a) const { return rule(a); }
  bool in_kernel(const Element& a) const { return rule(a) == codomain->identity(); }
};
using HomPtr = std::shared_ptr<const GroupHom>;

HomPtr hom_projection(GroupPtr g, SubgroupPtr n);
HomPtr hom_prufer_half(GroupPtr g, SubgroupPtr n);
HomPtr hom_table(GroupPtr g, SubgroupPtr n, const std::vector<std::pair<Element, Element>>& map);
HomPtr hom_from_json(GroupPtr g, SubgroupPtr n, const json& j);
// Pair (a, b) with rule(ab) != rule(a) rule(b) among the first `bound` elements.
std::optional<std::pair<Element, Element>> hom_witness(const GroupHom& h, std::size_t bound);
// Kernel elements among the first `bound` domain elements (all of them when finite).
std::vector<Element> kernel_prefix(const GroupHom& h, std::size_t bound);

Word multiply_words(const Group& g, const Word& a, const Word& b);
Word inverse_word(const Group& g, const Word& a);
Word identity_word(const Group& g, std::size_t n);

}  // namespace shiftforge
