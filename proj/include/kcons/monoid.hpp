#pragma once

/**
 * @file monoid.hpp
 * @brief Positive commutative monoids with optional capability records.
 *
 * A Monoid is a cheap, shareable handle around an immutable implementation.
 * The base interface is just zero, addition, membership and the literal
 * grammar; everything else (enumeration, canonical preorder, semiring and
 * semifield structure, power structure) is exposed through Capabilities and
 * throws capability_error when absent.
 */

#include "element.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kcons {

using json = nlohmann::json;

class capability_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Unknown monoid names, bad parameters, elements outside the universe.
class monoid_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Capabilities {
  bool finite = false;               ///< elements() enumerates the universe, zero first
  bool preorder = false;             ///< try_subtract decides b ⊑ c with a witness
  bool cancellative = false;
  bool weakly_cancellative = false;  ///< a+b = a+c implies b = c, b = 0 or c = 0
  bool totally_preordered = false;   ///< every pair is comparable under ⊑
  bool semiring = false;             ///< multiply / one
  bool lattice = false;              ///< semiring that is additively absorptive and multiplicatively idempotent
  bool semifield = false;            ///< divide by nonzero
  bool power = false;                ///< finite-support power of a base monoid
  bool downsets = false;             ///< downset(c) enumerates {x : x ⊑ c}
};

class Monoid;

class MonoidImpl {
 public:
  virtual ~MonoidImpl() = default;

  virtual std::string name() const = 0;
  virtual json descriptor() const = 0;
  virtual Element::Kind kind() const = 0;
  virtual Element zero() const = 0;
  virtual Element add(const Element& p, const Element& q) const = 0;
  virtual bool contains(const Element& p) const = 0;
  virtual Element parse(const json& literal) const = 0;
  virtual json render(const Element& p) const = 0;

  virtual std::vector<Element> elements() const { throw capability_error(name() + " is not finite"); }
  virtual std::optional<Element> try_subtract(const Element&, const Element&) const {
    throw capability_error(name() + " has no canonical preorder procedure");
  }
  virtual std::vector<Element> downset(const Element&) const {
    throw capability_error(name() + " cannot enumerate downsets");
  }
  virtual Element multiply(const Element&, const Element&) const {
    throw capability_error(name() + " is not a semiring");
  }
  virtual Element one() const { throw capability_error(name() + " is not a semiring"); }
  virtual Element divide(const Element&, const Element&) const {
    throw capability_error(name() + " is not a semifield");
  }
  virtual const Monoid* power_base() const { return nullptr; }
  /// Declared index set of a power monoid; nullopt for an open index.
  virtual std::optional<std::vector<std::string>> power_index() const { return std::nullopt; }

  const Capabilities& caps() const { return caps_; }

 protected:
  Capabilities caps_;
};

class Monoid {
 public:
  Monoid() = default;
  explicit Monoid(std::shared_ptr<const MonoidImpl> impl) : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  std::string name() const { return impl().name(); }
  json descriptor() const { return impl().descriptor(); }
  Element::Kind kind() const { return impl().kind(); }
  const Capabilities& caps() const { return impl().caps(); }

  Element zero() const { return impl().zero(); }
  bool is_zero(const Element& p) const { return p == impl().zero(); }
  bool contains(const Element& p) const { return impl().contains(p); }

  Element add(const Element& p, const Element& q) const {
    require(p);
    require(q);
    return impl().add(p, q);
  }

  Element sum(const std::vector<Element>& xs) const {
    Element acc = zero();
    for (const auto& x : xs) acc = add(acc, x);
    return acc;
  }

  /// n·c by double-and-add.
  Element times(Natural n, const Element& c) const {
    Element acc = zero();
    Element base = c;
    while (n > 0) {
      if (n & 1U) acc = add(acc, base);
      n >>= 1U;
      if (n > 0) base = add(base, base);
    }
    return acc;
  }

  Element parse(const json& literal) const {
    Element e = impl().parse(literal);
    require(e);
    return e;
  }
  json render(const Element& p) const { return impl().render(p); }

  std::vector<Element> elements() const { return impl().elements(); }

  std::optional<Element> try_subtract(const Element& b, const Element& c) const {
    if (!caps().preorder) throw capability_error(name() + " has no canonical preorder procedure");
    require(b);
    require(c);
    return impl().try_subtract(b, c);
  }
  bool leq(const Element& b, const Element& c) const { return try_subtract(b, c).has_value(); }

  std::vector<Element> downset(const Element& c) const {
    if (!caps().downsets) throw capability_error(name() + " cannot enumerate downsets");
    return impl().downset(c);
  }

  Element multiply(const Element& p, const Element& q) const { return impl().multiply(p, q); }
  Element one() const { return impl().one(); }
  Element divide(const Element& p, const Element& q) const { return impl().divide(p, q); }

  const Monoid* power_base() const { return impl().power_base(); }
  std::optional<std::vector<std::string>> power_index() const { return impl().power_index(); }

  /// Northwest corner applies: weakly cancellative and totally canonically preordered.
  bool northwest_capable() const {
    const auto& c = caps();
    return c.preorder && c.weakly_cancellative && c.totally_preordered;
  }

  /// Transportation property as a consequence of declared capabilities.
  bool has_transport_property() const {
    const auto& c = caps();
    if (c.lattice || c.semifield || northwest_capable()) return true;
    if (c.power && power_base() != nullptr) return power_base()->has_transport_property();
    return false;
  }

  bool same_as(const Monoid& other) const {
    return impl_ == other.impl_ || (valid() && other.valid() && descriptor() == other.descriptor());
  }

 private:
  const MonoidImpl& impl() const {
    if (!impl_) throw monoid_error("use of an empty monoid handle");
    return *impl_;
  }
  void require(const Element& p) const {
    if (!impl().contains(p)) throw monoid_error("element " + to_string(p) + " is not in " + name());
  }

  std::shared_ptr<const MonoidImpl> impl_;
};

/**
 * Index-based addition and preorder tables of a finite monoid, used by the
 * exhaustive solvers. Index 0 is always zero.
 */
struct FiniteTable {
  std::vector<Element> elems;
  std::vector<std::vector<int>> sum;
  std::vector<std::vector<char>> leq;  ///< leq[p][t]: some a has p + a = t
  std::map<Element, int> index;

  explicit FiniteTable(const Monoid& m) : elems(m.elements()) {
    const int n = static_cast<int>(elems.size());
    for (int i = 0; i < n; ++i) index.emplace(elems[i], i);
    sum.assign(n, std::vector<int>(n, 0));
    leq.assign(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        sum[i][j] = index.at(m.add(elems[i], elems[j]));
        leq[i][sum[i][j]] = 1;
      }
    }
  }

  int size() const { return static_cast<int>(elems.size()); }
  int of(const Element& e) const {
    auto it = index.find(e);
    if (it == index.end()) throw monoid_error("element " + to_string(e) + " outside finite table");
    return it->second;
  }
};

}  // namespace kcons
