#include "shiftforge/group.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>

namespace shiftforge {

namespace mp = boost::multiprecision;

void Group::validate(const Element& a) const {
  if (a.arity() != arity() || !is_valid(a))
    throw Error(Errc::MalformedElement, kind() + ": " + a.str());
}

std::vector<Element> Group::prefix(std::size_t n) const {
  if (auto o = order()) n = std::min(n, *o);
  std::vector<Element> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(at(k));
  return out;
}

bool Group::same_as(const Group& other) const {
  return this == &other || describe() == other.describe();
}

Element Group::power(const Element& a, long long n) const {
  Element base = n < 0 ? inverse(a) : a;
  unsigned long long e = n < 0 ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  Element acc = identity();
  while (e) {
    if (e & 1ULL) acc = multiply(acc, base);
    base = multiply(base, base);
    e >>= 1;
  }
  return acc;
}

namespace {

std::size_t small(const Integer& v) { return to_size(v); }

class CyclicGroup final : public Group {
 public:
  explicit CyclicGroup(std::size_t n) : n_(n) {
    if (n == 0) throw Error(Errc::ValidationError, "finite_cyclic needs n >= 1");
  }
  std::string kind() const override { return "finite_cyclic"; }
  std::size_t arity() const override { return 1; }
  Element identity() const override { return Element{0}; }
  Element multiply(const Element& a, const Element& b) const override {
    return Element{(a[0] + b[0]) % n_};
  }
  Element inverse(const Element& a) const override { return Element{(n_ - a[0]) % n_}; }
  bool is_valid(const Element& a) const override {
    return a.arity() == 1 && a[0] >= 0 && a[0] < n_;
  }
  std::optional<std::size_t> order() const override { return n_; }
  Element at(std::size_t k) const override {
    if (k >= n_) throw Error(Errc::IndexOutsideAxis, "enumeration index past group order");
    return Element{k};
  }
  Integer ordinal(const Element& a) const override { return a[0]; }
  bool ordinal_is_index() const override { return true; }
  bool is_abelian() const override { return true; }
  std::vector<Element> generators() const override {
    if (n_ == 1) return {};
    return {Element{1}};
  }
  json describe() const override { return {{"kind", "finite_cyclic"}, {"n", n_}}; }
  json encode(const Element& a) const override { return integer_to_json(a[0]); }
  Element decode(const json& j) const override {
    Element e{integer_from_json(j)};
    validate(e);
    return e;
  }
  std::string label(const Element& a) const override { return a[0].str(); }

 private:
  std::size_t n_;
};

const std::array<std::array<int, 3>, 6> kPerms = {{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                                   {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

int perm_index(const std::array<int, 3>& p) {
  for (int i = 0; i < 6; ++i)
    if (kPerms[i] == p) return i;
  return -1;
}

class Symmetric3 final : public Group {
 public:
  std::string kind() const override { return "symmetric3"; }
  std::size_t arity() const override { return 1; }
  Element identity() const override { return Element{0}; }
  Element multiply(const Element& a, const Element& b) const override {
    const auto& p = kPerms[small(a[0])];
    const auto& q = kPerms[small(b[0])];
    std::array<int, 3> r{};
    for (int i = 0; i < 3; ++i) r[i] = p[q[i]];
    return Element{perm_index(r)};
  }
  Element inverse(const Element& a) const override {
    const auto& p = kPerms[small(a[0])];
    std::array<int, 3> r{};
    for (int i = 0; i < 3; ++i) r[p[i]] = i;
    return Element{perm_index(r)};
  }
  bool is_valid(const Element& a) const override {
    return a.arity() == 1 && a[0] >= 0 && a[0] < 6;
  }
  std::optional<std::size_t> order() const override { return 6; }
  Element at(std::size_t k) const override {
    if (k >= 6) throw Error(Errc::IndexOutsideAxis, "enumeration index past group order");
    return Element{k};
  }
  Integer ordinal(const Element& a) const override { return a[0]; }
  bool ordinal_is_index() const override { return true; }
  bool is_abelian() const override { return false; }
  std::vector<Element> generators() const override { return {Element{1}, Element{3}}; }
  json describe() const override { return {{"kind", "symmetric3"}}; }
  json encode(const Element& a) const override {
    const auto& p = kPerms[small(a[0])];
    return json::array({p[0], p[1], p[2]});
  }
  Element decode(const json& j) const override {
    if (!j.is_array() || j.size() != 3) throw Error(Errc::MalformedElement, "symmetric3: " + j.dump());
    std::array<int, 3> p{};
    for (int i = 0; i < 3; ++i) {
      if (!j[i].is_number_integer()) throw Error(Errc::MalformedElement, "symmetric3: " + j.dump());
      p[i] = j[i].get<int>();
    }
    int idx = perm_index(p);
    if (idx < 0) throw Error(Errc::MalformedElement, "symmetric3: " + j.dump());
    return Element{idx};
  }
  std::string label(const Element& a) const override {
    const auto& p = kPerms[small(a[0])];
    return std::to_string(p[0]) + std::to_string(p[1]) + std::to_string(p[2]);
  }
};

class IntegerGroup final : public Group {
 public:
  std::string kind() const override { return "int"; }
  std::size_t arity() const override { return 1; }
  Element identity() const override { return Element{0}; }
  Element multiply(const Element& a, const Element& b) const override { return Element{a[0] + b[0]}; }
  Element inverse(const Element& a) const override { return Element{-a[0]}; }
  bool is_valid(const Element& a) const override { return a.arity() == 1; }
  std::optional<std::size_t> order() const override { return std::nullopt; }
  Element at(std::size_t k) const override { return Element{unzigzag(Integer(k))}; }
  Integer ordinal(const Element& a) const override { return zigzag(a[0]); }
  bool ordinal_is_index() const override { return true; }
  bool is_abelian() const override { return true; }
  std::vector<Element> generators() const override { return {Element{1}}; }
  json describe() const override { return {{"kind", "int"}}; }
  json encode(const Element& a) const override { return integer_to_json(a[0]); }
  Element decode(const json& j) const override { return Element{integer_from_json(j)}; }
  std::string label(const Element& a) const override { return a[0].str(); }
};

class IntegerPairGroup final : public Group {
 public:
  std::string kind() const override { return "int_pair"; }
  std::size_t arity() const override { return 2; }
  Element identity() const override { return Element{0, 0}; }
  Element multiply(const Element& a, const Element& b) const override {
    return Element{a[0] + b[0], a[1] + b[1]};
  }
  Element inverse(const Element& a) const override { return Element{-a[0], -a[1]}; }
  bool is_valid(const Element& a) const override { return a.arity() == 2; }
  std::optional<std::size_t> order() const override { return std::nullopt; }
  Element at(std::size_t k) const override {
    auto [i, j] = cantor_unpair(Integer(k));
    return Element{unzigzag(i), unzigzag(j)};
  }
  Integer ordinal(const Element& a) const override { return cantor_pair(zigzag(a[0]), zigzag(a[1])); }
  bool ordinal_is_index() const override { return true; }
  bool is_abelian() const override { return true; }
  std::vector<Element> generators() const override { return {Element{1, 0}, Element{0, 1}}; }
  json describe() const override { return {{"kind", "int_pair"}}; }
  json encode(const Element& a) const override {
    return json::array({integer_to_json(a[0]), integer_to_json(a[1])});
  }
  Element decode(const json& j) const override {
    if (!j.is_array() || j.size() != 2) throw Error(Errc::MalformedElement, "int_pair: " + j.dump());
    return Element{integer_from_json(j[0]), integer_from_json(j[1])};
  }
  std::string label(const Element& a) const override {
    return "(" + a[0].str() + "," + a[1].str() + ")";
  }
};

Integer pow2(const Integer& i) { return Integer(1) << static_cast<unsigned>(small(i)); }

class Prufer2Group final : public Group {
 public:
  std::string kind() const override { return "prufer2"; }
  std::size_t arity() const override { return 2; }
  Element identity() const override { return Element{0, 1}; }
  Element multiply(const Element& a, const Element& b) const override {
    const Integer& i = a[1];
    const Integer& j = b[1];
    Integer l = i > j ? i : j;
    Integer num = a[0] * pow2(l - i) + b[0] * pow2(l - j);
    return prufer_make(floor_mod(num, pow2(l)), l);
  }
  Element inverse(const Element& a) const override {
    if (a[0] == 0) return a;
    return Element{pow2(a[1]) - a[0], a[1]};
  }
  bool is_valid(const Element& a) const override {
    if (a.arity() != 2) return false;
    if (a[0] == 0 && a[1] == 1) return true;
    if (a[1] < 1 || a[1] > 4096) return false;
    return a[0] > 0 && a[0] < pow2(a[1]) && (a[0] % 2 == 1);
  }
  std::optional<std::size_t> order() const override { return std::nullopt; }
  Element at(std::size_t k) const override {
    if (k == 0) return identity();
    Integer kk(k);
    unsigned i = mp::msb(kk) + 1;
    Integer g = 2 * (kk - (Integer(1) << (i - 1))) + 1;
    return Element{g, Integer(i)};
  }
  Integer ordinal(const Element& a) const override {
    if (a[0] == 0) return 0;
    return pow2(a[1] - 1) + (a[0] - 1) / 2;
  }
  bool ordinal_is_index() const override { return true; }
  bool is_abelian() const override { return true; }
  json describe() const override { return {{"kind", "prufer2"}}; }
  json encode(const Element& a) const override {
    return json::array({integer_to_json(a[0]), integer_to_json(a[1])});
  }
  Element decode(const json& j) const override {
    if (!j.is_array() || j.size() != 2) throw Error(Errc::MalformedElement, "prufer2: " + j.dump());
    Element e{integer_from_json(j[0]), integer_from_json(j[1])};
    validate(e);
    return e;
  }
  std::string label(const Element& a) const override {
    return "[" + a[0].str() + "," + a[1].str() + "]";
  }
};

std::optional<std::size_t> rest_order(const std::vector<std::optional<std::size_t>>& orders,
                                      std::size_t pos) {
  std::size_t acc = 1;
  for (std::size_t i = pos; i < orders.size(); ++i) {
    if (!orders[i]) return std::nullopt;
    acc *= *orders[i];
  }
  return acc;
}

void split_index(const std::vector<std::optional<std::size_t>>& orders, std::size_t pos,
                 const Integer& k, std::vector<Integer>& out) {
  if (pos + 1 == orders.size()) {
    out.push_back(k);
    return;
  }
  auto o = orders[pos];
  auto rest = rest_order(orders, pos + 1);
  Integer a, b;
  if (rest) {
    a = k / *rest;
    b = k % *rest;
  } else if (o) {
    a = k % *o;
    b = k / *o;
  } else {
    std::tie(a, b) = cantor_unpair(k);
  }
  out.push_back(a);
  split_index(orders, pos + 1, b, out);
}

Integer join_index(const std::vector<std::optional<std::size_t>>& orders, std::size_t pos,
                   const std::vector<Integer>& idx) {
  if (pos + 1 == orders.size()) return idx[pos];
  Integer b = join_index(orders, pos + 1, idx);
  auto o = orders[pos];
  auto rest = rest_order(orders, pos + 1);
  if (rest) return idx[pos] * *rest + b;
  if (o) return b * *o + idx[pos];
  return cantor_pair(idx[pos], b);
}

class ProductGroup : public Group {
 public:
  ProductGroup(std::vector<GroupPtr> factors, std::string kind, json desc)
      : f_(std::move(factors)), kind_(std::move(kind)), desc_(std::move(desc)) {
    if (f_.empty()) throw Error(Errc::ValidationError, "product needs at least one factor");
    for (const auto& g : f_) {
      offs_.push_back(arity_);
      arity_ += g->arity();
      orders_.push_back(g->order());
      index_ordinals_ = index_ordinals_ && g->ordinal_is_index();
    }
    order_ = rest_order(orders_, 0);
  }
  std::string kind() const override { return kind_; }
  std::size_t arity() const override { return arity_; }
  Element identity() const override {
    std::vector<Integer> c;
    for (const auto& g : f_) append(c, g->identity());
    return Element(std::move(c));
  }
  Element multiply(const Element& a, const Element& b) const override {
    std::vector<Integer> c;
    c.reserve(arity_);
    for (std::size_t i = 0; i < f_.size(); ++i) append(c, f_[i]->multiply(part(a, i), part(b, i)));
    return Element(std::move(c));
  }
  Element inverse(const Element& a) const override {
    std::vector<Integer> c;
    for (std::size_t i = 0; i < f_.size(); ++i) append(c, f_[i]->inverse(part(a, i)));
    return Element(std::move(c));
  }
  bool is_valid(const Element& a) const override {
    if (a.arity() != arity_) return false;
    for (std::size_t i = 0; i < f_.size(); ++i)
      if (!f_[i]->is_valid(part(a, i))) return false;
    return true;
  }
  std::optional<std::size_t> order() const override { return order_; }
  Element at(std::size_t k) const override {
    if (order_ && k >= *order_) throw Error(Errc::IndexOutsideAxis, "enumeration index past group order");
    std::vector<Integer> idx;
    split_index(orders_, 0, Integer(k), idx);
    std::vector<Integer> c;
    for (std::size_t i = 0; i < f_.size(); ++i) append(c, f_[i]->at(small(idx[i])));
    return Element(std::move(c));
  }
  Integer ordinal(const Element& a) const override {
    std::vector<Integer> idx;
    for (std::size_t i = 0; i < f_.size(); ++i) idx.push_back(f_[i]->ordinal(part(a, i)));
    if (index_ordinals_) return join_index(orders_, 0, idx);
    Integer acc = idx.back();
    for (std::size_t i = f_.size() - 1; i-- > 0;) acc = cantor_pair(idx[i], acc);
    return acc;
  }
  bool ordinal_is_index() const override { return index_ordinals_; }
  bool is_abelian() const override {
    return std::all_of(f_.begin(), f_.end(), [](const GroupPtr& g) { return g->is_abelian(); });
  }
  std::vector<Element> generators() const override {
    std::vector<Element> out;
    for (std::size_t i = 0; i < f_.size(); ++i) {
      auto gens = f_[i]->generators();
      if (gens.empty() && !(f_[i]->order() && *f_[i]->order() == 1)) return {};
      for (const auto& g : gens) {
        std::vector<Integer> c;
        for (std::size_t j = 0; j < f_.size(); ++j) append(c, j == i ? g : f_[j]->identity());
        out.emplace_back(std::move(c));
      }
    }
    return out;
  }
  json describe() const override { return desc_; }
  json encode(const Element& a) const override {
    json arr = json::array();
    for (std::size_t i = 0; i < f_.size(); ++i) arr.push_back(f_[i]->encode(part(a, i)));
    return arr;
  }
  Element decode(const json& j) const override {
    if (!j.is_array() || j.size() != f_.size())
      throw Error(Errc::MalformedElement, kind_ + ": expected array of " + std::to_string(f_.size()));
    std::vector<Integer> c;
    for (std::size_t i = 0; i < f_.size(); ++i) append(c, f_[i]->decode(j[i]));
    return Element(std::move(c));
  }
  std::string label(const Element& a) const override {
    std::string s = "<";
    for (std::size_t i = 0; i < f_.size(); ++i) {
      if (i) s += ",";
      s += f_[i]->label(part(a, i));
    }
    return s + ">";
  }

  const std::vector<GroupPtr>& factors() const noexcept { return f_; }
  Element part(const Element& a, std::size_t i) const { return a.slice(offs_[i], f_[i]->arity()); }

 protected:
  static void append(std::vector<Integer>& c, const Element& e) {
    c.insert(c.end(), e.coords().begin(), e.coords().end());
  }

  std::vector<GroupPtr> f_;
  std::string kind_;
  json desc_;
  std::vector<std::size_t> offs_;
  std::size_t arity_ = 0;
  std::vector<std::optional<std::size_t>> orders_;
  std::optional<std::size_t> order_;
  bool index_ordinals_ = true;
};

class TableGroup final : public Group {
 public:
  TableGroup(std::string name, std::vector<std::string> names, std::vector<std::vector<std::size_t>> t)
      : name_(std::move(name)), names_(std::move(names)), t_(std::move(t)) {
    const std::size_t n = names_.size();
    if (n == 0 || t_.size() != n) throw Error(Errc::ValidationError, "table group: bad table shape");
    for (const auto& row : t_)
      if (row.size() != n) throw Error(Errc::ValidationError, "table group: bad table shape");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (t_[i][j] >= n) throw Error(Errc::ValidationError, "table group: entry out of range");
      }
    if (!(t_[0][0] == 0))
      throw Error(Errc::ValidationError, "table group: element 0 must be the identity");
    for (std::size_t i = 0; i < n; ++i)
      if (t_[0][i] != i || t_[i][0] != i)
        throw Error(Errc::ValidationError, "table group: element 0 must be the identity");
    inv_.assign(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (t_[i][j] == 0 && t_[j][i] == 0) inv_[i] = j;
    for (std::size_t i = 0; i < n; ++i)
      if (inv_[i] == n) throw Error(Errc::ValidationError, "table group: missing inverse");
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (t_[t_[a][b]][c] != t_[a][t_[b][c]])
            throw Error(Errc::ValidationError, "table group: not associative");
  }
  std::string kind() const override { return "table"; }
  std::size_t arity() const override { return 1; }
  Element identity() const override { return Element{0}; }
  Element multiply(const Element& a, const Element& b) const override {
    return Element{t_[small(a[0])][small(b[0])]};
  }
  Element inverse(const Element& a) const override { return Element{inv_[small(a[0])]}; }
  bool is_valid(const Element& a) const override {
    return a.arity() == 1 && a[0] >= 0 && a[0] < names_.size();
  }
  std::optional<std::size_t> order() const override { return names_.size(); }
  Element at(std::size_t k) const override {
    if (k >= names_.size()) throw Error(Errc::IndexOutsideAxis, "enumeration index past group order");
    return Element{k};
  }
  Integer ordinal(const Element& a) const override { return a[0]; }
  bool ordinal_is_index() const override { return true; }
  bool is_abelian() const override {
    for (std::size_t i = 0; i < t_.size(); ++i)
      for (std::size_t j = 0; j < t_.size(); ++j)
        if (t_[i][j] != t_[j][i]) return false;
    return true;
  }
  json describe() const override {
    return {{"kind", "table"}, {"name", name_}, {"elements", names_}};
  }
  json encode(const Element& a) const override { return names_[small(a[0])]; }
  Element decode(const json& j) const override {
    if (j.is_string()) {
      auto it = std::find(names_.begin(), names_.end(), j.get<std::string>());
      if (it != names_.end()) return Element{static_cast<std::size_t>(it - names_.begin())};
    }
    throw Error(Errc::MalformedElement, "table: " + j.dump());
  }
  std::string label(const Element& a) const override { return names_[small(a[0])]; }

 private:
  std::string name_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> t_;
  std::vector<std::size_t> inv_;
};

class SubgroupAlphabet final : public Group {
 public:
  explicit SubgroupAlphabet(SubgroupPtr h) : h_(std::move(h)), base_(h_->parent()) {}
  std::string kind() const override { return "subgroup"; }
  std::size_t arity() const override { return base_->arity(); }
  Element identity() const override { return base_->identity(); }
  Element multiply(const Element& a, const Element& b) const override { return base_->multiply(a, b); }
  Element inverse(const Element& a) const override { return base_->inverse(a); }
  bool is_valid(const Element& a) const override { return base_->is_valid(a) && h_->contains(a); }
  std::optional<std::size_t> order() const override { return h_->order(); }
  Element at(std::size_t k) const override {
    if (h_->is_finite()) {
      const auto& e = h_->elements();
      if (k >= e.size()) throw Error(Errc::IndexOutsideAxis, "enumeration index past group order");
      return e[k];
    }
    auto p = h_->prefix(k + 1);
    if (p.size() <= k) throw Error(Errc::DepthExhausted, "subgroup enumeration exhausted its scan cap");
    return p[k];
  }
  Integer ordinal(const Element& a) const override { return base_->ordinal(a); }
  bool is_abelian() const override { return base_->is_abelian(); }
  std::vector<Element> generators() const override { return h_->generators(); }
  json describe() const override {
    return {{"kind", "subgroup"}, {"base", base_->describe()}, {"subgroup", h_->descriptor()}};
  }
  json encode(const Element& a) const override { return base_->encode(a); }
  Element decode(const json& j) const override {
    Element e = base_->decode(j);
    validate(e);
    return e;
  }
  std::string label(const Element& a) const override { return base_->label(a); }

 private:
  SubgroupPtr h_;
  GroupPtr base_;
};

class SectionProduct final : public ProductGroup {
 public:
  SectionProduct(QuotientPtr q, GroupPtr k)
      : ProductGroup({q, k}, "section_product",
                     json{{"kind", "section_product"}, {"quotient", q->describe()}}),
        q_(std::move(q)) {}
  Element multiply(const Element& a, const Element& b) const override {
    return split(q_->base()->multiply(join(a), join(b)));
  }
  Element inverse(const Element& a) const override { return split(q_->base()->inverse(join(a))); }
  bool is_abelian() const override { return q_->base()->is_abelian(); }
  std::vector<Element> generators() const override { return {}; }

  Element join(const Element& a) const {
    return q_->base()->multiply(q_->section(part(a, 0)), part(a, 1));
  }
  Element split(const Element& g) const {
    Element c = q_->project(g);
    return Element::concat(c, q_->base()->multiply(q_->base()->inverse(q_->section(c)), g));
  }

 private:
  QuotientPtr q_;
};

void require_same(const SubgroupPtr& a, const SubgroupPtr& b) {
  if (a.get() == b.get()) return;
  if (!a->parent()->same_as(*b->parent()) || a->descriptor() != b->descriptor() ||
      a->descriptor().is_null())
    throw Error(Errc::MismatchedSubgroup, a->name() + " vs " + b->name());
}

}  // namespace

Element prufer_make(const Integer& g0, const Integer& i0) {
  Integer g = g0;
  Integer i = i0;
  if (g == 0) return Element{0, 1};
  while (g % 2 == 0 && i > 1) {
    g /= 2;
    i -= 1;
  }
  if (g % 2 == 0) return Element{0, 1};
  return Element{g, i};
}

Element prufer_delta(const Element& a) {
  if (a[0] == 0) return a;
  return Element{a[0], a[1] + 1};
}

GroupPtr make_cyclic(std::size_t n) { return std::make_shared<CyclicGroup>(n); }
GroupPtr make_symmetric3() { return std::make_shared<Symmetric3>(); }
GroupPtr make_integers() { return std::make_shared<IntegerGroup>(); }
GroupPtr make_integer_pairs() { return std::make_shared<IntegerPairGroup>(); }
GroupPtr make_prufer2() { return std::make_shared<Prufer2Group>(); }

GroupPtr make_product(std::vector<GroupPtr> factors) {
  json d{{"kind", "product"}, {"factors", json::array()}};
  for (const auto& f : factors) d["factors"].push_back(f->describe());
  return std::make_shared<ProductGroup>(std::move(factors), "product", std::move(d));
}

GroupPtr make_block_group(GroupPtr base, std::size_t len) {
  if (len == 0) throw Error(Errc::ValidationError, "block_group needs len >= 1");
  json d{{"kind", "block_group"}, {"base", base->describe()}, {"len", len}};
  return std::make_shared<ProductGroup>(std::vector<GroupPtr>(len, base), "block_group", std::move(d));
}

GroupPtr make_table_group(std::string name, std::vector<std::string> names,
                          std::vector<std::vector<std::size_t>> table) {
  return std::make_shared<TableGroup>(std::move(name), std::move(names), std::move(table));
}

std::vector<GroupPtr> product_factors(const GroupPtr& g) {
  if (auto p = std::dynamic_pointer_cast<const ProductGroup>(g)) return p->factors();
  return {g};
}

GroupPtr group_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::ParseError, "alphabet needs a kind");
  const std::string k = j.at("kind").get<std::string>();
  if (k == "finite_cyclic") return make_cyclic(j.at("n").get<std::size_t>());
  if (k == "trivial") return make_cyclic(1);
  if (k == "symmetric3") return make_symmetric3();
  if (k == "int") return make_integers();
  if (k == "int_pair") return make_integer_pairs();
  if (k == "prufer2") return make_prufer2();
  if (k == "block_group")
    return make_block_group(group_from_json(j.at("base")), j.at("len").get<std::size_t>());
  if (k == "product") {
    std::vector<GroupPtr> f;
    for (const auto& x : j.at("factors")) f.push_back(group_from_json(x));
    return make_product(std::move(f));
  }
  if (k == "quotient") {
    GroupPtr base = group_from_json(j.at("base"));
    return make_quotient(base, subgroup_from_json(base, j.at("subgroup")));
  }
  throw Error(Errc::ParseError, "unknown alphabet kind: " + k);
}

// ---------------------------------------------------------------- subgroups

SubgroupHandle::SubgroupHandle(Spec s) : s_(std::move(s)) {
  if (s_.elements) {
    auto& e = *s_.elements;
    std::sort(e.begin(), e.end(), [this](const Element& a, const Element& b) {
      return s_.parent->ordinal(a) < s_.parent->ordinal(b);
    });
  }
}

const std::vector<Element>& SubgroupHandle::elements() const {
  if (!s_.elements) throw Error(Errc::Unsupported, "subgroup " + s_.name + " is not finite");
  return *s_.elements;
}

std::optional<std::size_t> SubgroupHandle::order() const {
  if (s_.elements) return s_.elements->size();
  return std::nullopt;
}

Element SubgroupHandle::canonical(const Element& a) const {
  if (s_.canonical) return s_.canonical(a);
  if (!s_.elements) throw Error(Errc::NoCanonicalRep, "subgroup " + s_.name);
  {
    std::lock_guard<std::mutex> lock(memo_->m);
    auto it = memo_->table.find(a);
    if (it != memo_->table.end()) return it->second;
  }
  const auto& g = *s_.parent;
  Element best = g.multiply(a, s_.elements->front());
  Integer best_ord = g.ordinal(best);
  for (std::size_t i = 1; i < s_.elements->size(); ++i) {
    Element c = g.multiply(a, (*s_.elements)[i]);
    Integer o = g.ordinal(c);
    if (o < best_ord) {
      best_ord = o;
      best = std::move(c);
    }
  }
  std::lock_guard<std::mutex> lock(memo_->m);
  if (memo_->table.size() < 8192) memo_->table.emplace(a, best);
  return best;
}

std::vector<Element> SubgroupHandle::prefix(std::size_t n) const {
  if (s_.elements) {
    const auto& e = *s_.elements;
    return std::vector<Element>(e.begin(), e.begin() + std::min(n, e.size()));
  }
  std::vector<Element> out;
  if (s_.enumerate) {
    for (std::size_t k = 0; k < n; ++k) out.push_back(s_.enumerate(k));
    return out;
  }
  const std::size_t cap = std::max<std::size_t>(4096, 64 * n);
  auto po = s_.parent->order();
  for (std::size_t k = 0; k < cap && out.size() < n; ++k) {
    if (po && k >= *po) break;
    Element e = s_.parent->at(k);
    if (s_.contains(e)) out.push_back(std::move(e));
  }
  return out;
}

SubgroupPtr make_finite_subgroup(GroupPtr g, std::vector<Element> elems, std::string name,
                                 json descriptor) {
  std::set<Element> set;
  for (auto& e : elems) {
    g->validate(e);
    set.insert(e);
  }
  if (!set.count(g->identity()))
    throw Error(Errc::ValidationError, "subgroup " + name + " does not contain the identity");
  for (const auto& a : set)
    for (const auto& b : set)
      if (!set.count(g->multiply(a, g->inverse(b))))
        throw Error(Errc::ValidationError, "subgroup " + name + " not closed: " + g->label(a) +
                                               " * " + g->label(b) + "^-1");
  if (descriptor.is_null()) {
    descriptor = {{"kind", "finite_list"}, {"elems", json::array()}};
    for (const auto& e : set) descriptor["elems"].push_back(g->encode(e));
  }
  SubgroupHandle::Spec s;
  s.parent = g;
  s.name = std::move(name);
  auto shared = std::make_shared<std::set<Element>>(set);
  s.contains = [shared](const Element& a) { return shared->count(a) > 0; };
  s.elements = std::vector<Element>(set.begin(), set.end());
  s.generators = *s.elements;
  if (auto o = g->order()) s.index = {IndexKind::Finite, *o / set.size()};
  else s.index = {IndexKind::Infinite, 0};
  s.descriptor = std::move(descriptor);
  auto h = std::make_shared<SubgroupHandle>(std::move(s));
  if (!g->is_abelian() && normality_witness(*h, g->order().value_or(64))) {
    SubgroupHandle::Spec s2;
    s2.parent = g;
    s2.name = h->name();
    s2.contains = [shared](const Element& a) { return shared->count(a) > 0; };
    s2.elements = h->elements();
    s2.generators = h->generators();
    s2.index = h->index();
    s2.normal = false;
    s2.descriptor = h->descriptor();
    return std::make_shared<SubgroupHandle>(std::move(s2));
  }
  return h;
}

SubgroupPtr make_trivial_subgroup(GroupPtr g) {
  return make_finite_subgroup(g, {g->identity()}, "trivial",
                              json{{"kind", "builtin"}, {"name", "trivial"}});
}

SubgroupPtr make_whole_subgroup(GroupPtr g) {
  if (g->is_finite()) {
    return make_finite_subgroup(g, g->prefix(*g->order()), "whole",
                                json{{"kind", "builtin"}, {"name", "whole"}});
  }
  SubgroupHandle::Spec s;
  s.parent = g;
  s.name = "whole";
  s.contains = [](const Element&) { return true; };
  Element id = g->identity();
  s.canonical = [id](const Element&) { return id; };
  s.enumerate = [g](std::size_t k) { return g->at(k); };
  s.generators = g->generators();
  s.index = {IndexKind::Finite, 1};
  s.descriptor = {{"kind", "builtin"}, {"name", "whole"}};
  return std::make_shared<SubgroupHandle>(std::move(s));
}

namespace {

std::vector<Element> closure_bfs(const GroupPtr& g, const std::vector<Element>& gens, std::size_t cap) {
  std::set<Element> seen{g->identity()};
  std::vector<Element> frontier{g->identity()};
  while (!frontier.empty()) {
    std::vector<Element> next;
    for (const auto& a : frontier)
      for (const auto& s : gens) {
        Element b = g->multiply(a, s);
        if (seen.insert(b).second) {
          if (seen.size() > cap)
            throw Error(Errc::ValidationError, "generated subgroup exceeds enumeration cap");
          next.push_back(b);
        }
      }
    frontier = std::move(next);
  }
  return std::vector<Element>(seen.begin(), seen.end());
}

SubgroupPtr int_multiples(GroupPtr g, Integer d, json desc, std::string name) {
  if (d == 0) return make_trivial_subgroup(g);
  SubgroupHandle::Spec s;
  s.parent = g;
  s.name = std::move(name);
  s.contains = [d](const Element& a) { return a[0] % d == 0; };
  s.canonical = [d](const Element& a) {
    Integer r = floor_mod(a[0], d);
    if (r == 0) return Element{0};
    Integer alt = r - d;
    return zigzag(alt) < zigzag(r) ? Element{alt} : Element{r};
  };
  s.enumerate = [d](std::size_t k) { return Element{d * unzigzag(Integer(k))}; };
  s.generators = {Element{d}};
  s.index = {IndexKind::Finite, to_size(d)};
  s.descriptor = std::move(desc);
  return std::make_shared<SubgroupHandle>(std::move(s));
}

// Lattice in Z^2 with basis (p,q), (0,r) in echelon form.
SubgroupPtr int_pair_lattice(GroupPtr g, const std::vector<Element>& gens, json desc) {
  std::vector<std::pair<Integer, Integer>> rows;
  for (const auto& e : gens) rows.emplace_back(e[0], e[1]);
  Integer p = 0, q = 0;
  std::vector<Integer> second;
  // Euclid on the first column.
  while (true) {
    std::size_t pivot = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].first != 0 &&
          (pivot == rows.size() || mp::abs(rows[i].first) < mp::abs(rows[pivot].first)))
        pivot = i;
    if (pivot == rows.size()) break;
    bool reduced = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == pivot || rows[i].first == 0) continue;
      Integer t = rows[i].first / rows[pivot].first;
      rows[i].first -= t * rows[pivot].first;
      rows[i].second -= t * rows[pivot].second;
      reduced = true;
    }
    if (!reduced) {
      p = rows[pivot].first;
      q = rows[pivot].second;
      if (p < 0) {
        p = -p;
        q = -q;
      }
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(pivot));
      break;
    }
  }
  Integer r = 0;
  for (const auto& row : rows) r = boost::multiprecision::gcd(r, mp::abs(row.second));
  if (r != 0) q = floor_mod(q, r);
  if (p == 0 && r == 0) return make_trivial_subgroup(g);
  SubgroupHandle::Spec s;
  s.parent = g;
  s.name = "lattice";
  auto reduce = [p, q, r](const Element& a) {
    Integer x = a[0], y = a[1];
    if (p != 0) {
      Integer xr = floor_mod(x, p);
      Integer t = (x - xr) / p;
      y -= t * q;
      x = xr;
    }
    if (r != 0) y = floor_mod(y, r);
    return Element{x, y};
  };
  s.contains = [reduce](const Element& a) { return reduce(a) == Element{0, 0}; };
  s.canonical = reduce;
  s.enumerate = [p, q, r](std::size_t k) {
    if (p == 0) return Element{0, r * unzigzag(Integer(k))};
    if (r == 0) {
      Integer t = unzigzag(Integer(k));
      return Element{t * p, t * q};
    }
    auto [i, j] = cantor_unpair(Integer(k));
    Integer a = unzigzag(i), b = unzigzag(j);
    return Element{a * p, a * q + b * r};
  };
  if (p != 0) s.generators.push_back(Element{p, q});
  if (r != 0) s.generators.push_back(Element{0, r});
  if (p != 0 && r != 0) s.index = {IndexKind::Finite, to_size(p * r)};
  else s.index = {IndexKind::Infinite, 0};
  s.descriptor = std::move(desc);
  return std::make_shared<SubgroupHandle>(std::move(s));
}

}  // namespace

SubgroupPtr make_generated_subgroup(GroupPtr g, std::vector<Element> gens) {
  json desc{{"kind", "generated"}, {"gens", json::array()}};
  for (const auto& e : gens) {
    g->validate(e);
    desc["gens"].push_back(g->encode(e));
  }
  const std::string k = g->kind();
  if (k == "int") {
    Integer d = 0;
    for (const auto& e : gens) d = boost::multiprecision::gcd(d, mp::abs(e[0]));
    return int_multiples(g, d, desc, "generated");
  }
  if (k == "int_pair") return int_pair_lattice(g, gens, desc);
  if (!g->is_finite() && k != "prufer2")
    throw Error(Errc::ValidationError, "generated subgroups of " + k + " are not supported");
  return make_finite_subgroup(g, closure_bfs(g, gens, 1u << 16), "generated", desc);
}

SubgroupPtr make_builtin_subgroup(GroupPtr g, const std::string& name) {
  json desc{{"kind", "builtin"}, {"name", name}};
  if (name == "trivial") return make_trivial_subgroup(g);
  if (name == "whole") return make_whole_subgroup(g);
  if (name == "evens") {
    if (g->kind() != "int") throw Error(Errc::ValidationError, "builtin evens needs alphabet int");
    return int_multiples(g, 2, desc, "evens");
  }
  if (name == "prufer2_H1") {
    if (g->kind() != "prufer2")
      throw Error(Errc::ValidationError, "builtin prufer2_H1 needs alphabet prufer2");
    return make_finite_subgroup(g, {Element{0, 1}, Element{1, 1}}, "H1", desc);
  }
  throw Error(Errc::ValidationError, "unknown builtin subgroup: " + name);
}

SubgroupPtr subgroup_from_json(GroupPtr g, const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::ParseError, "subgroup needs a kind");
  const std::string k = j.at("kind").get<std::string>();
  if (k == "builtin") return make_builtin_subgroup(g, j.at("name").get<std::string>());
  if (k == "finite_list") {
    std::vector<Element> e;
    for (const auto& x : j.at("elems")) e.push_back(g->decode(x));
    return make_finite_subgroup(g, std::move(e), "finite_list");
  }
  if (k == "generated") {
    std::vector<Element> e;
    for (const auto& x : j.at("gens")) e.push_back(g->decode(x));
    return make_generated_subgroup(g, std::move(e));
  }
  throw Error(Errc::ParseError, "unknown subgroup kind: " + k);
}

SubgroupPtr make_predicate_subgroup(GroupPtr g, std::string name,
                                    std::function<bool(const Element&)> contains,
                                    std::function<Element(const Element&)> canonical) {
  SubgroupHandle::Spec s;
  s.parent = g;
  s.name = name;
  s.contains = contains;
  s.canonical = std::move(canonical);
  s.descriptor = {{"kind", "predicate"}, {"name", name}};
  // Large finite parents stay membership-only.
  if (auto o = g->order(); o && *o <= 4096) {
    std::vector<Element> e;
    for (std::size_t k = 0; k < *o; ++k) {
      Element x = g->at(k);
      if (contains(x)) e.push_back(std::move(x));
    }
    s.index = {IndexKind::Finite, *o / e.size()};
    s.elements = std::move(e);
    s.canonical = nullptr;
  }
  return std::make_shared<SubgroupHandle>(std::move(s));
}

std::optional<std::pair<Element, Element>> normality_witness(const SubgroupHandle& h,
                                                             std::size_t bound) {
  const auto& g = *h.parent();
  if (g.is_abelian()) return std::nullopt;
  auto gs = g.prefix(bound);
  auto hs = h.prefix(bound);
  for (const auto& a : gs)
    for (const auto& x : hs)
      if (!h.contains(g.multiply(g.multiply(a, x), g.inverse(a)))) return std::make_pair(a, x);
  return std::nullopt;
}

std::optional<std::pair<Element, Element>> closure_witness(const SubgroupHandle& h,
                                                           std::size_t bound) {
  const auto& g = *h.parent();
  auto hs = h.prefix(bound);
  for (const auto& a : hs)
    for (const auto& b : hs)
      if (!h.contains(g.multiply(a, g.inverse(b)))) return std::make_pair(a, b);
  return std::nullopt;
}

// ------------------------------------------------------------------ cosets

bool coset_eq(const Coset& a, const Coset& b) {
  require_same(a.subgroup, b.subgroup);
  const auto& g = *a.subgroup->parent();
  return a.subgroup->contains(g.multiply(g.inverse(a.rep), b.rep));
}

Coset canonicalize(const Coset& c) {
  if (!c.subgroup->has_canonical()) return c;
  return Coset{c.subgroup->canonical(c.rep), c.subgroup};
}

Coset coset_mul(const Coset& a, const Coset& b) {
  require_same(a.subgroup, b.subgroup);
  if (!a.subgroup->is_normal()) throw Error(Errc::NotNormal, a.subgroup->name());
  const auto& g = *a.subgroup->parent();
  return canonicalize(Coset{g.multiply(a.rep, b.rep), a.subgroup});
}

bool coset_contains(const Coset& c, const Element& x) {
  const auto& g = *c.subgroup->parent();
  return c.subgroup->contains(g.multiply(g.inverse(c.rep), x));
}

// ---------------------------------------------------------------- quotients

QuotientGroup::QuotientGroup(GroupPtr base, SubgroupPtr h) : base_(std::move(base)), h_(std::move(h)) {
  if (!h_->is_normal()) throw Error(Errc::NotNormal, "quotient by non-normal " + h_->name());
  if (!h_->has_canonical()) throw Error(Errc::NoCanonicalRep, "quotient by " + h_->name());
  id_ = h_->canonical(base_->identity());
  auto idx = h_->index();
  if (idx.kind == IndexKind::Finite) {
    order_ = idx.value;
  } else if (auto o = base_->order()) {
    order_ = *o / h_->elements().size();
  } else {
    order_ = std::nullopt;
  }
}

Element QuotientGroup::multiply(const Element& a, const Element& b) const {
  return project(base_->multiply(a, b));
}

Element QuotientGroup::inverse(const Element& a) const { return project(base_->inverse(a)); }

bool QuotientGroup::is_valid(const Element& a) const {
  return base_->is_valid(a) && project(a) == a;
}

Element QuotientGroup::at(std::size_t k) const {
  std::lock_guard<std::mutex> lock(mu_);
  const std::size_t cap = std::max<std::size_t>(1u << 16, 64 * (k + 1));
  while (seen_.size() <= k) {
    if (order_ && seen_.size() >= *order_)
      throw Error(Errc::IndexOutsideAxis, "enumeration index past group order");
    if (auto bo = base_->order(); bo && cursor_ >= *bo)
      throw Error(Errc::IndexOutsideAxis, "enumeration index past group order");
    if (cursor_ >= cap) throw Error(Errc::DepthExhausted, "quotient enumeration scan cap reached");
    Element c = project(base_->at(cursor_++));
    if (seen_set_.insert(c).second) seen_.push_back(std::move(c));
  }
  return seen_[k];
}

std::vector<Element> QuotientGroup::generators() const {
  std::set<Element> out;
  for (const auto& g : base_->generators()) {
    Element c = project(g);
    if (c != id_) out.insert(c);
  }
  if (base_->generators().empty()) return {};
  return std::vector<Element>(out.begin(), out.end());
}

json QuotientGroup::describe() const {
  return {{"kind", "quotient"}, {"base", base_->describe()}, {"subgroup", h_->descriptor()}};
}

std::string QuotientGroup::label(const Element& a) const { return base_->label(a) + "+" + h_->name(); }

QuotientPtr make_quotient(GroupPtr g, SubgroupPtr h) {
  return std::make_shared<QuotientGroup>(std::move(g), std::move(h));
}

GroupPtr make_subgroup_alphabet(SubgroupPtr h) { return std::make_shared<SubgroupAlphabet>(std::move(h)); }

GroupPtr make_section_product(QuotientPtr q) {
  GroupPtr k = make_subgroup_alphabet(q->subgroup());
  return std::make_shared<SectionProduct>(std::move(q), std::move(k));
}

// ------------------------------------------------------------------ homs

HomPtr hom_projection(GroupPtr g, SubgroupPtr n) {
  auto h = std::make_shared<GroupHom>();
  h->domain = g;
  h->codomain = make_quotient(g, n);
  h->name = "projection";
  h->descriptor = {{"kind", "projection"}};
  auto q = h->codomain;
  h->rule = [q](const Element& a) { return q->project(a); };
  h->preimage = [](const Element& c) { return std::optional<Element>(c); };
  h->kernel = n;
  return h;
}

HomPtr hom_prufer_half(GroupPtr g, SubgroupPtr n) {
  if (g->kind() != "prufer2") throw Error(Errc::ValidationError, "prufer_half needs alphabet prufer2");
  auto h = std::make_shared<GroupHom>();
  h->domain = g;
  h->codomain = make_quotient(g, n);
  h->name = "prufer_half";
  h->descriptor = {{"kind", "prufer_half"}};
  auto q = h->codomain;
  h->rule = [q](const Element& a) { return q->project(prufer_delta(a)); };
  // Halving then doubling lands back in the same coset of H1.
  h->preimage = [g](const Element& c) { return std::optional<Element>(g->multiply(c, c)); };
  if (n->descriptor() == json{{"kind", "builtin"}, {"name", "prufer2_H1"}})
    h->kernel = make_trivial_subgroup(g);
  return h;
}

HomPtr hom_table(GroupPtr g, SubgroupPtr n, const std::vector<std::pair<Element, Element>>& map) {
  if (!g->is_finite()) throw Error(Errc::ValidationError, "table hom needs a finite alphabet");
  auto q = make_quotient(g, n);
  auto table = std::make_shared<std::map<Element, Element>>();
  json desc{{"kind", "table"}, {"map", json::array()}};
  for (const auto& [a, b] : map) {
    g->validate(a);
    g->validate(b);
    (*table)[a] = q->project(b);
    desc["map"].push_back(json::array({g->encode(a), g->encode(b)}));
  }
  for (const auto& a : g->prefix(*g->order()))
    if (!table->count(a)) throw Error(Errc::ValidationError, "table hom misses " + g->label(a));
  auto h = std::make_shared<GroupHom>();
  h->domain = g;
  h->codomain = q;
  h->name = "table";
  h->descriptor = std::move(desc);
  h->rule = [table](const Element& a) { return table->at(a); };
  h->preimage = [table](const Element& c) -> std::optional<Element> {
    for (const auto& [a, b] : *table)
      if (b == c) return a;
    return std::nullopt;
  };
  std::vector<Element> ker;
  for (const auto& [a, b] : *table)
    if (b == q->identity()) ker.push_back(a);
  h->kernel = make_finite_subgroup(g, ker, "ker");
  return h;
}

HomPtr hom_from_json(GroupPtr g, SubgroupPtr n, const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::ParseError, "hom needs a kind");
  const std::string k = j.at("kind").get<std::string>();
  if (k == "projection") return hom_projection(g, n);
  if (k == "prufer_half") return hom_prufer_half(g, n);
  if (k == "table") {
    std::vector<std::pair<Element, Element>> m;
    for (const auto& row : j.at("map")) {
      if (!row.is_array() || row.size() != 2) throw Error(Errc::ParseError, "table row: " + row.dump());
      m.emplace_back(g->decode(row[0]), g->decode(row[1]));
    }
    return hom_table(g, n, m);
  }
  throw Error(Errc::ParseError, "unknown hom kind: " + k);
}

std::optional<std::pair<Element, Element>> hom_witness(const GroupHom& h, std::size_t bound) {
  auto xs = h.domain->prefix(bound);
  const auto& q = *h.codomain;
  if (h.apply(h.domain->identity()) != q.identity())
    return std::make_pair(h.domain->identity(), h.domain->identity());
  for (const auto& a : xs) {
    Element fa = h.apply(a);
    for (const auto& b : xs)
      if (h.apply(h.domain->multiply(a, b)) != q.multiply(fa, h.apply(b))) return std::make_pair(a, b);
  }
  return std::nullopt;
}

std::vector<Element> kernel_prefix(const GroupHom& h, std::size_t bound) {
  std::vector<Element> out;
  for (const auto& a : h.domain->prefix(bound))
    if (h.in_kernel(a)) out.push_back(a);
  return out;
}

Word multiply_words(const Group& g, const Word& a, const Word& b) {
  Word out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(g.multiply(a[i], b[i]));
  return out;
}

Word inverse_word(const Group& g, const Word& a) {
  Word out;
  for (const auto& x : a) out.push_back(g.inverse(x));
  return out;
}

Word identity_word(const Group& g, std::size_t n) { return Word(n, g.identity()); }

}  // namespace shiftforge
