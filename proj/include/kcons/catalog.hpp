#pragma once

/**
 * @file catalog.hpp
 * @brief Built-in monoids: B, N, N2, M2, Q, R1, V, fuzzy, P(A), Pk, user
 * tables, free monoids and finite-support powers.
 */

#include "monoid.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <utility>

namespace kcons {

namespace detail {

inline Natural parse_natural_literal(const json& j, const std::string& monoid) {
  if (j.is_number_unsigned()) return j.get<Natural>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<Natural>(j.get<std::int64_t>());
  throw monoid_error("expected a non-negative integer literal for " + monoid + ", got " + j.dump());
}

inline bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch) != 0; });
}

/// Accepts JSON integers and strings "p" or "p/q".
inline Rational parse_rational_literal(const json& j, const std::string& monoid) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned() || j.get<std::int64_t>() >= 0) return Rational(j.get<std::int64_t>());
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    const std::string num = s.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (all_digits(num) && all_digits(den)) {
      boost::multiprecision::cpp_int p(num), q(den);
      if (q != 0) return Rational(p, q);
    }
  }
  throw monoid_error("expected a non-negative rational literal \"p/q\" for " + monoid + ", got " + j.dump());
}

inline json render_rational(const Rational& q) { return to_string(Element(q)); }

/**
 * Monoid on indices 0..n-1 given by an addition table; 0 is zero. Serves
 * B, truncated naturals, M2, bounded orders, truncated powersets and user
 * supplied tables.
 */
class TableMonoid : public MonoidImpl {
 public:
  TableMonoid(std::string name, json descriptor, std::vector<std::vector<Natural>> add,
              std::vector<std::vector<Natural>> mul, Natural one, Capabilities caps)
      : name_(std::move(name)), desc_(std::move(descriptor)), add_(std::move(add)), mul_(std::move(mul)), one_(one) {
    caps_ = caps;
    caps_.finite = true;
    caps_.preorder = true;
    caps_.downsets = true;
    caps_.semiring = !mul_.empty();
  }

  std::string name() const override { return name_; }
  json descriptor() const override { return desc_; }
  Element::Kind kind() const override { return Element::Kind::natural; }
  Element zero() const override { return Natural{0}; }
  Element add(const Element& p, const Element& q) const override { return add_[p.as_natural()][q.as_natural()]; }
  bool contains(const Element& p) const override {
    return p.kind() == Element::Kind::natural && p.as_natural() < add_.size();
  }
  Element parse(const json& literal) const override {
    Element e = parse_natural_literal(literal, name_);
    if (!contains(e)) throw monoid_error("literal " + literal.dump() + " is outside " + name_);
    return e;
  }
  json render(const Element& p) const override { return p.as_natural(); }

  std::vector<Element> elements() const override {
    std::vector<Element> out;
    for (Natural i = 0; i < add_.size(); ++i) out.emplace_back(i);
    return out;
  }
  /// Table scan; the first witness in enumeration order wins.
  std::optional<Element> try_subtract(const Element& b, const Element& c) const override {
    const auto bi = b.as_natural();
    for (Natural a = 0; a < add_.size(); ++a) {
      if (add_[bi][a] == c.as_natural()) return Element(a);
    }
    return std::nullopt;
  }
  std::vector<Element> downset(const Element& c) const override {
    std::vector<Element> out;
    for (Natural x = 0; x < add_.size(); ++x) {
      if (try_subtract(x, c)) out.emplace_back(x);
    }
    return out;
  }
  Element multiply(const Element& p, const Element& q) const override {
    if (mul_.empty()) return MonoidImpl::multiply(p, q);
    return mul_[p.as_natural()][q.as_natural()];
  }
  Element one() const override {
    if (mul_.empty()) return MonoidImpl::one();
    return one_;
  }

  std::size_t size() const { return add_.size(); }
  Natural sum_index(Natural a, Natural b) const { return add_[a][b]; }

 private:
  std::string name_;
  json desc_;
  std::vector<std::vector<Natural>> add_;
  std::vector<std::vector<Natural>> mul_;
  Natural one_;
};

class NaturalMonoid : public MonoidImpl {
 public:
  NaturalMonoid() {
    caps_.preorder = caps_.cancellative = caps_.weakly_cancellative = caps_.totally_preordered = true;
    caps_.semiring = caps_.downsets = true;
  }
  std::string name() const override { return "N"; }
  json descriptor() const override { return {{"name", "N"}}; }
  Element::Kind kind() const override { return Element::Kind::natural; }
  Element zero() const override { return Natural{0}; }
  Element add(const Element& p, const Element& q) const override {
    return checked_add(p.as_natural(), q.as_natural());
  }
  bool contains(const Element& p) const override { return p.kind() == Element::Kind::natural; }
  Element parse(const json& literal) const override { return parse_natural_literal(literal, "N"); }
  json render(const Element& p) const override { return p.as_natural(); }
  std::optional<Element> try_subtract(const Element& b, const Element& c) const override {
    if (b.as_natural() > c.as_natural()) return std::nullopt;
    return Element(c.as_natural() - b.as_natural());
  }
  std::vector<Element> downset(const Element& c) const override {
    std::vector<Element> out;
    for (Natural x = 0; x <= c.as_natural(); ++x) out.emplace_back(x);
    return out;
  }
  Element multiply(const Element& p, const Element& q) const override {
    return checked_mul(p.as_natural(), q.as_natural());
  }
  Element one() const override { return Natural{1}; }
};

/// Rationals: Q≥0, gap rationals {0} ∪ [t,∞), and the fuzzy max/min lattice on [0,1].
class RationalMonoid : public MonoidImpl {
 public:
  enum class Variant { nonneg, gap, fuzzy };

  RationalMonoid(Variant v, Rational threshold) : v_(v), t_(std::move(threshold)) {
    switch (v_) {
      case Variant::nonneg:
        caps_.preorder = caps_.cancellative = caps_.weakly_cancellative = caps_.totally_preordered = true;
        caps_.semiring = caps_.semifield = true;
        break;
      case Variant::gap:
        caps_.preorder = caps_.cancellative = caps_.weakly_cancellative = true;
        break;
      case Variant::fuzzy:
        caps_.preorder = caps_.totally_preordered = true;
        caps_.semiring = caps_.lattice = true;
        break;
    }
  }

  std::string name() const override {
    switch (v_) {
      case Variant::nonneg: return "Q";
      case Variant::gap: return t_ == 1 ? "R1" : "R1(" + to_string(Element(t_)) + ")";
      case Variant::fuzzy: return "fuzzy";
    }
    return {};
  }
  json descriptor() const override {
    json d{{"name", v_ == Variant::nonneg ? "Q" : v_ == Variant::gap ? "R1" : "fuzzy"}};
    if (v_ == Variant::gap && t_ != 1) d["params"] = {{"threshold", render_rational(t_)}};
    return d;
  }
  Element::Kind kind() const override { return Element::Kind::rational; }
  Element zero() const override { return Element(Rational(0)); }
  Element add(const Element& p, const Element& q) const override {
    if (v_ == Variant::fuzzy) return std::max(p, q);
    return Element(Rational(p.as_rational() + q.as_rational()));
  }
  bool contains(const Element& p) const override {
    if (p.kind() != Element::Kind::rational) return false;
    const auto& q = p.as_rational();
    if (q < 0) return false;
    if (v_ == Variant::gap) return q == 0 || q >= t_;
    if (v_ == Variant::fuzzy) return q <= 1;
    return true;
  }
  Element parse(const json& literal) const override {
    Element e(parse_rational_literal(literal, name()));
    if (!contains(e)) throw monoid_error("literal " + literal.dump() + " is outside " + name());
    return e;
  }
  json render(const Element& p) const override { return render_rational(p.as_rational()); }

  std::optional<Element> try_subtract(const Element& b, const Element& c) const override {
    const auto& x = b.as_rational();
    const auto& y = c.as_rational();
    if (v_ == Variant::fuzzy) {
      if (x > y) return std::nullopt;
      return c;
    }
    Element a{Rational(y - x)};
    if (!contains(a)) return std::nullopt;
    return a;
  }
  Element multiply(const Element& p, const Element& q) const override {
    if (v_ == Variant::fuzzy) return std::min(p, q);
    if (v_ == Variant::nonneg) return Element(Rational(p.as_rational() * q.as_rational()));
    return MonoidImpl::multiply(p, q);
  }
  Element one() const override {
    if (v_ == Variant::gap) return MonoidImpl::one();
    return Element(Rational(1));
  }
  Element divide(const Element& p, const Element& q) const override {
    if (v_ != Variant::nonneg) return MonoidImpl::divide(p, q);
    if (q.as_rational() == 0) throw std::domain_error("division by zero in Q");
    return Element(Rational(p.as_rational() / q.as_rational()));
  }

 private:
  Variant v_;
  Rational t_;
};

/// Powerset of a finite universe under union; lattice semiring with intersection.
class PowersetMonoid : public MonoidImpl {
 public:
  explicit PowersetMonoid(NameSet universe) : universe_(Element(std::move(universe)).as_set()) {
    caps_.preorder = caps_.semiring = caps_.lattice = caps_.downsets = true;
    caps_.finite = universe_.size() <= 16;
  }
  std::string name() const override {
    std::string s = "P(";
    for (std::size_t i = 0; i < universe_.size(); ++i) s += (i ? "," : "") + universe_[i];
    return s + ")";
  }
  json descriptor() const override { return {{"name", "P"}, {"params", {{"universe", universe_}}}}; }
  Element::Kind kind() const override { return Element::Kind::set; }
  Element zero() const override { return Element(NameSet{}); }
  Element add(const Element& p, const Element& q) const override {
    NameSet out;
    std::set_union(p.as_set().begin(), p.as_set().end(), q.as_set().begin(), q.as_set().end(),
                   std::back_inserter(out));
    return Element(std::move(out));
  }
  bool contains(const Element& p) const override {
    if (p.kind() != Element::Kind::set) return false;
    return std::includes(universe_.begin(), universe_.end(), p.as_set().begin(), p.as_set().end());
  }
  Element parse(const json& literal) const override {
    if (!literal.is_array()) throw monoid_error("expected an array of names for " + name());
    NameSet s;
    for (const auto& x : literal) {
      if (!x.is_string()) throw monoid_error("expected an array of names for " + name());
      s.push_back(x.get<std::string>());
    }
    Element e(std::move(s));
    if (!contains(e)) throw monoid_error("literal " + literal.dump() + " is outside " + name());
    return e;
  }
  json render(const Element& p) const override { return p.as_set(); }
  std::vector<Element> elements() const override {
    if (!caps_.finite) return MonoidImpl::elements();
    std::vector<Element> out;
    const std::size_t n = universe_.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) out.push_back(from_mask(mask));
    std::stable_sort(out.begin(), out.end(),
                     [](const Element& a, const Element& b) { return a.as_set().size() < b.as_set().size(); });
    return out;
  }
  std::optional<Element> try_subtract(const Element& b, const Element& c) const override {
    if (!std::includes(c.as_set().begin(), c.as_set().end(), b.as_set().begin(), b.as_set().end())) {
      return std::nullopt;
    }
    return c;
  }
  std::vector<Element> downset(const Element& c) const override {
    std::vector<Element> out;
    const auto& s = c.as_set();
    for (std::size_t mask = 0; mask < (std::size_t{1} << s.size()); ++mask) {
      NameSet sub;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (mask & (std::size_t{1} << i)) sub.push_back(s[i]);
      }
      out.emplace_back(std::move(sub));
    }
    return out;
  }
  Element multiply(const Element& p, const Element& q) const override {
    NameSet out;
    std::set_intersection(p.as_set().begin(), p.as_set().end(), q.as_set().begin(), q.as_set().end(),
                          std::back_inserter(out));
    return Element(std::move(out));
  }
  Element one() const override { return Element(universe_); }

 private:
  Element from_mask(std::size_t mask) const {
    NameSet s;
    for (std::size_t i = 0; i < universe_.size(); ++i) {
      if (mask & (std::size_t{1} << i)) s.push_back(universe_[i]);
    }
    return Element(std::move(s));
  }
  NameSet universe_;
};

/**
 * Finite-support maps from an index set into a base monoid. With base N
 * this is the free commutative monoid on the index names.
 */
class PowerMonoid : public MonoidImpl {
 public:
  PowerMonoid(Monoid base, std::optional<NameSet> index, bool free)
      : base_(std::move(base)), free_(free) {
    if (index) index_ = Element(*index).as_set();
    const auto& bc = base_.caps();
    caps_.power = true;
    caps_.preorder = bc.preorder;
    caps_.cancellative = bc.cancellative;
    caps_.weakly_cancellative = bc.cancellative || (index_ && index_->size() == 1 && bc.weakly_cancellative);
    caps_.totally_preordered = index_ && index_->size() == 1 && bc.totally_preordered;
    caps_.downsets = bc.downsets;
    if (bc.finite && index_) {
      double count = 1;
      const double base_size = static_cast<double>(base_.elements().size());
      for (std::size_t i = 0; i < index_->size(); ++i) count *= base_size;
      caps_.finite = count <= 4096;
    }
  }

  std::string name() const override {
    std::string s = free_ ? "free" : "power(" + base_.name() + ")";
    if (index_) {
      s += "{";
      for (std::size_t i = 0; i < index_->size(); ++i) s += (i ? "," : "") + (*index_)[i];
      s += "}";
    }
    return s;
  }
  json descriptor() const override {
    json params = json::object();
    if (!free_) params["base"] = base_.descriptor();
    if (index_) params[free_ ? "generators" : "index"] = *index_;
    json d{{"name", free_ ? "free" : "power"}};
    if (!params.empty()) d["params"] = params;
    return d;
  }
  Element::Kind kind() const override { return Element::Kind::map; }
  Element zero() const override { return Element(ElementMap{}); }

  Element add(const Element& p, const Element& q) const override {
    return combine(p, q, [this](const Element* x, const Element* y) -> std::optional<Element> {
      if (x && y) return base_.add(*x, *y);
      return x ? *x : *y;
    });
  }
  bool contains(const Element& p) const override {
    if (p.kind() != Element::Kind::map) return false;
    for (const auto& [k, v] : p.as_map()) {
      if (index_ && !std::binary_search(index_->begin(), index_->end(), k)) return false;
      if (!base_.contains(v) || base_.is_zero(v)) return false;
    }
    return true;
  }
  Element parse(const json& literal) const override {
    if (!literal.is_object()) throw monoid_error("expected an object literal for " + name());
    ElementMap m;
    for (auto it = literal.begin(); it != literal.end(); ++it) {
      Element v = base_.parse(it.value());
      if (!base_.is_zero(v)) m.emplace_back(it.key(), std::move(v));
    }
    Element e(std::move(m));
    if (!contains(e)) throw monoid_error("literal " + literal.dump() + " is outside " + name());
    return e;
  }
  json render(const Element& p) const override {
    json out = json::object();
    for (const auto& [k, v] : p.as_map()) out[k] = base_.render(v);
    return out;
  }

  std::vector<Element> elements() const override {
    if (!caps_.finite) return MonoidImpl::elements();
    const auto be = base_.elements();
    std::vector<Element> out{zero()};
    for (const auto& key : *index_) {
      std::vector<Element> next;
      for (const auto& e : out) {
        for (const auto& v : be) next.push_back(with(e, key, v));
      }
      out = std::move(next);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Element& a, const Element& b) { return a.as_map().size() < b.as_map().size(); });
    return out;
  }
  /// Componentwise subtraction over the keys of b and c.
  std::optional<Element> try_subtract(const Element& b, const Element& c) const override {
    bool ok = true;
    Element r = combine(b, c, [&](const Element* x, const Element* y) -> std::optional<Element> {
      if (!ok) return std::nullopt;
      if (!y) {
        ok = false;
        return std::nullopt;
      }
      if (!x) return *y;
      auto a = base_.try_subtract(*x, *y);
      if (!a) ok = false;
      return a;
    });
    if (!ok) return std::nullopt;
    return r;
  }
  std::vector<Element> downset(const Element& c) const override {
    std::vector<Element> out{zero()};
    for (const auto& [k, v] : c.as_map()) {
      const auto below = base_.downset(v);
      std::vector<Element> next;
      for (const auto& e : out) {
        for (const auto& x : below) next.push_back(with(e, k, x));
      }
      out = std::move(next);
    }
    return out;
  }
  const Monoid* power_base() const override { return &base_; }
  std::optional<std::vector<std::string>> power_index() const override { return index_; }

  /// Returns e with component key set to v (dropped when v is zero).
  Element with(const Element& e, const std::string& key, const Element& v) const {
    ElementMap m;
    for (const auto& [k, x] : e.as_map()) {
      if (k != key) m.emplace_back(k, x);
    }
    if (!base_.is_zero(v)) m.emplace_back(key, v);
    return Element(std::move(m));
  }

 private:
  template <class F>
  Element combine(const Element& p, const Element& q, F f) const {
    const auto& a = p.as_map();
    const auto& b = q.as_map();
    ElementMap out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      std::optional<Element> v;
      std::string key;
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        key = a[i].first;
        v = f(&a[i].second, nullptr);
        ++i;
      } else if (i == a.size() || b[j].first < a[i].first) {
        key = b[j].first;
        v = f(nullptr, &b[j].second);
        ++j;
      } else {
        key = a[i].first;
        v = f(&a[i].second, &b[j].second);
        ++i;
        ++j;
      }
      if (v && !base_.is_zero(*v)) out.emplace_back(std::move(key), std::move(*v));
    }
    return Element(std::move(out));
  }

  Monoid base_;
  std::optional<NameSet> index_;
  bool free_;
};

inline json param(const json& params, const std::string& key) {
  if (params.is_object() && params.contains(key)) return params.at(key);
  return nullptr;
}

inline std::vector<std::vector<Natural>> build_table(std::size_t n, const std::function<Natural(Natural, Natural)>& f) {
  std::vector<std::vector<Natural>> t(n, std::vector<Natural>(n));
  for (Natural i = 0; i < n; ++i) {
    for (Natural j = 0; j < n; ++j) t[i][j] = f(i, j);
  }
  return t;
}

/// Exhaustive verification of the monoid axioms and of declared flags on a finite table.
inline void verify_table(const std::string& name, const std::vector<std::vector<Natural>>& t, const Capabilities& caps) {
  const std::size_t n = t.size();
  if (n < 2) throw monoid_error(name + ": universe needs at least two elements");
  for (const auto& row : t) {
    if (row.size() != n) throw monoid_error(name + ": addition table is not square");
    for (auto v : row) {
      if (v >= n) throw monoid_error(name + ": addition table entry out of range");
    }
  }
  for (Natural a = 0; a < n; ++a) {
    if (t[0][a] != a) throw monoid_error(name + ": 0 is not neutral");
    for (Natural b = 0; b < n; ++b) {
      if (t[a][b] != t[b][a]) throw monoid_error(name + ": addition is not commutative");
      if (t[a][b] == 0 && (a != 0 || b != 0)) throw monoid_error(name + ": monoid is not positive");
      for (Natural c = 0; c < n; ++c) {
        if (t[t[a][b]][c] != t[a][t[b][c]]) throw monoid_error(name + ": addition is not associative");
        if (caps.weakly_cancellative && t[a][b] == t[a][c] && b != c && b != 0 && c != 0) {
          throw monoid_error(name + ": declared weakly cancellative but is not");
        }
        if (caps.cancellative && t[a][b] == t[a][c] && b != c) {
          throw monoid_error(name + ": declared cancellative but is not");
        }
      }
      if (caps.totally_preordered) {
        bool ab = false, ba = false;
        for (Natural x = 0; x < n; ++x) {
          ab = ab || t[a][x] == b;
          ba = ba || t[b][x] == a;
        }
        if (!ab && !ba) throw monoid_error(name + ": declared totally preordered but is not");
      }
    }
  }
}

inline Monoid make_table_monoid(std::string name, json desc, std::vector<std::vector<Natural>> add,
                                Capabilities caps, std::vector<std::vector<Natural>> mul = {}, Natural one = 0) {
  verify_table(name, add, caps);
  return Monoid(std::make_shared<TableMonoid>(std::move(name), std::move(desc), std::move(add), std::move(mul), one,
                                              caps));
}

inline Natural natural_param(const json& params, const std::string& key, Natural fallback) {
  const json v = param(params, key);
  if (v.is_null()) return fallback;
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw monoid_error("parameter '" + key + "' must be a natural number");
  return v.get<Natural>();
}

inline std::optional<NameSet> names_param(const json& params, const std::string& key) {
  const json v = param(params, key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_array()) throw monoid_error("parameter '" + key + "' must be an array of names");
  NameSet out;
  for (const auto& x : v) {
    if (!x.is_string()) throw monoid_error("parameter '" + key + "' must be an array of names");
    out.push_back(x.get<std::string>());
  }
  return out;
}

}  // namespace detail

/**
 * Builds a catalog monoid. Names: B, N, N2 (param cap), M2, Q, R1 (param
 * threshold), V (param max), fuzzy, P (param universe), Pk (param k), table
 * (params add, mul, one, weakly_cancellative, totally_preordered,
 * cancellative), free (param generators), power (params base, index).
 */
inline Monoid make_builtin(const std::string& name, const json& params = json::object()) {
  using namespace detail;
  if (name == "B") {
    Capabilities c;
    c.weakly_cancellative = c.totally_preordered = c.lattice = true;
    auto add = build_table(2, [](Natural a, Natural b) { return a | b; });
    auto mul = build_table(2, [](Natural a, Natural b) { return a & b; });
    return make_table_monoid("B", {{"name", "B"}}, add, c, mul, 1);
  }
  if (name == "N") return Monoid(std::make_shared<NaturalMonoid>());
  if (name == "N2" || name == "Ntrunc") {
    const Natural cap = natural_param(params, "cap", 2);
    if (cap < 1) throw monoid_error("truncation cap must be at least 1");
    if (cap > 4096) throw monoid_error("truncation cap too large for a finite table");
    Capabilities c;
    c.totally_preordered = true;
    c.weakly_cancellative = cap == 1;
    json desc{{"name", "N2"}};
    if (cap != 2) desc["params"] = {{"cap", cap}};
    return make_table_monoid(cap == 2 ? "N2" : "N" + std::to_string(cap), desc,
                             build_table(cap + 1, [cap](Natural a, Natural b) { return std::min(a + b, cap); }), c);
  }
  if (name == "M2") {
    Capabilities c;
    c.weakly_cancellative = c.totally_preordered = true;
    // 1 and 2 form a two-element group with identity 2; 0 is adjoined.
    auto add = build_table(3, [](Natural a, Natural b) -> Natural {
      if (a == 0) return b;
      if (b == 0) return a;
      return a == b ? 2 : 1;
    });
    return make_table_monoid("M2", {{"name", "M2"}}, add, c);
  }
  if (name == "Q" || name == "Q>=0" || name == "Q≥0") {
    return Monoid(std::make_shared<RationalMonoid>(RationalMonoid::Variant::nonneg, Rational(0)));
  }
  if (name == "R1") {
    Rational t = 1;
    const json v = param(params, "threshold");
    if (!v.is_null()) t = parse_rational_literal(v, "R1 threshold");
    if (t <= 0) throw monoid_error("gap threshold must be positive");
    return Monoid(std::make_shared<RationalMonoid>(RationalMonoid::Variant::gap, t));
  }
  if (name == "fuzzy") return Monoid(std::make_shared<RationalMonoid>(RationalMonoid::Variant::fuzzy, Rational(0)));
  if (name == "V") {
    const Natural max = natural_param(params, "max", 1);
    if (max < 1 || max > 4096) throw monoid_error("bounded order needs 1 <= max <= 4096");
    Capabilities c;
    c.totally_preordered = c.lattice = true;
    c.weakly_cancellative = max == 1;
    auto add = build_table(max + 1, [](Natural a, Natural b) { return std::max(a, b); });
    auto mul = build_table(max + 1, [](Natural a, Natural b) { return std::min(a, b); });
    return make_table_monoid("V" + std::to_string(max), {{"name", "V"}, {"params", {{"max", max}}}}, add, c, mul,
                             max);
  }
  if (name == "P") {
    auto universe = names_param(params, "universe");
    if (!universe || universe->empty()) throw monoid_error("powerset needs a non-empty universe");
    return Monoid(std::make_shared<PowersetMonoid>(*universe));
  }
  if (name == "Pk") {
    const Natural k = natural_param(params, "k", 0);
    if (k < 1 || k > 4096) throw monoid_error("truncated powerset needs 1 <= k <= 4096");
    // i + i = i, distinct nonzero summands collapse to the top element k+1.
    auto add = build_table(k + 2, [k](Natural a, Natural b) -> Natural {
      if (a == 0) return b;
      if (b == 0) return a;
      return a == b ? a : k + 1;
    });
    return make_table_monoid("P" + std::to_string(k), {{"name", "Pk"}, {"params", {{"k", k}}}}, add, Capabilities{});
  }
  if (name == "table") {
    const json add_j = param(params, "add");
    if (!add_j.is_array()) throw monoid_error("table monoid needs an 'add' matrix");
    std::vector<std::vector<Natural>> add;
    try {
      add = add_j.get<std::vector<std::vector<Natural>>>();
    } catch (const json::exception&) {
      throw monoid_error("table 'add' must be a matrix of indices");
    }
    Capabilities c;
    auto flag = [&](const char* key) {
      const json v = param(params, key);
      return v.is_boolean() && v.get<bool>();
    };
    c.weakly_cancellative = flag("weakly_cancellative");
    c.totally_preordered = flag("totally_preordered");
    c.cancellative = flag("cancellative");
    c.weakly_cancellative = c.weakly_cancellative || c.cancellative;
    std::vector<std::vector<Natural>> mul;
    Natural one = 0;
    if (const json m = param(params, "mul"); !m.is_null()) {
      try {
        mul = m.get<std::vector<std::vector<Natural>>>();
      } catch (const json::exception&) {
        throw monoid_error("table 'mul' must be a matrix of indices");
      }
      one = natural_param(params, "one", 1);
    }
    json desc{{"name", "table"}, {"params", params}};
    return make_table_monoid("table" + std::to_string(add.size()), desc, add, c, mul, one);
  }
  if (name == "free") {
    return Monoid(std::make_shared<PowerMonoid>(Monoid(std::make_shared<NaturalMonoid>()),
                                                names_param(params, "generators"), true));
  }
  if (name == "power") {
    const json b = param(params, "base");
    if (!b.is_object() || !b.contains("name")) throw monoid_error("power monoid needs a 'base' descriptor");
    Monoid base = make_builtin(b.at("name").get<std::string>(), b.value("params", json::object()));
    return Monoid(std::make_shared<PowerMonoid>(std::move(base), names_param(params, "index"), false));
  }
  throw monoid_error("unknown monoid '" + name + "'");
}

/// Descriptor form {"name": ..., "params": {...}} or a bare name string.
inline Monoid make_monoid(const json& desc) {
  if (desc.is_string()) return make_builtin(desc.get<std::string>());
  if (!desc.is_object() || !desc.contains("name") || !desc.at("name").is_string()) {
    throw monoid_error("monoid descriptor needs a 'name'");
  }
  return make_builtin(desc.at("name").get<std::string>(), desc.value("params", json::object()));
}

/// Inverse of to_string for elements of m; used to read free-cover generator names.
inline Element element_from_name(const Monoid& m, const std::string& text) {
  auto trimmed = [](std::string s) {
    const auto b = s.find_first_not_of(' ');
    const auto e = s.find_last_not_of(' ');
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  // Splits "{a,b:{c}}" at top-level commas.
  auto split = [&](const std::string& body) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : body) {
      if (ch == '{') ++depth;
      if (ch == '}') --depth;
      if (ch == ',' && depth == 0) {
        parts.push_back(trimmed(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!trimmed(cur).empty()) parts.push_back(trimmed(cur));
    return parts;
  };
  const std::string s = trimmed(text);
  switch (m.kind()) {
    case Element::Kind::natural:
      if (!detail::all_digits(s)) break;
      return m.parse(json(std::stoull(s)));
    case Element::Kind::rational:
      return m.parse(json(s));
    case Element::Kind::set: {
      if (s.size() < 2 || s.front() != '{' || s.back() != '}') break;
      json arr = json::array();
      for (const auto& p : split(s.substr(1, s.size() - 2))) arr.push_back(p);
      return m.parse(arr);
    }
    case Element::Kind::map: {
      if (s.size() < 2 || s.front() != '{' || s.back() != '}' || m.power_base() == nullptr) break;
      ElementMap out;
      for (const auto& p : split(s.substr(1, s.size() - 2))) {
        const auto colon = p.find(':');
        if (colon == std::string::npos) throw monoid_error("bad map element name '" + text + "'");
        out.emplace_back(trimmed(p.substr(0, colon)), element_from_name(*m.power_base(), p.substr(colon + 1)));
      }
      Element e(std::move(out));
      if (!m.contains(e)) break;
      return e;
    }
  }
  throw monoid_error("'" + text + "' does not name an element of " + m.name());
}

}  // namespace kcons
