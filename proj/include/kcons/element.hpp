#pragma once

/**
 * @file element.hpp
 * @brief Value-semantic monoid elements.
 *
 * Every monoid in the catalog stores its elements in one of four shapes:
 * a natural number, an exact non-negative rational, a finite set of names,
 * or a finite map from keys to nested elements (free and power monoids).
 * Elements are canonical on construction, so structural equality is
 * semantic equality.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace kcons {

using Rational = boost::multiprecision::cpp_rational;
using Natural = std::uint64_t;

struct Element;

/// Sorted set of names; used by powerset monoids.
using NameSet = std::vector<std::string>;

/// Sorted finite map; entries never carry the base monoid's zero.
using ElementMap = std::vector<std::pair<std::string, Element>>;

struct Element {
  enum class Kind { natural, rational, set, map };

  Element() : value(Natural{0}) {}
  Element(Natural n) : value(n) {}  // NOLINT(google-explicit-constructor)
  explicit Element(Rational q) : value(std::move(q)) {}
  explicit Element(NameSet s);
  explicit Element(ElementMap m);

  Kind kind() const { return static_cast<Kind>(value.index()); }

  Natural as_natural() const;
  const Rational& as_rational() const;
  const NameSet& as_set() const;
  const ElementMap& as_map() const;

  /// Lookup in a map element; nullptr when the key is absent.
  const Element* find(const std::string& key) const;

  friend bool operator==(const Element& a, const Element& b) { return a.value == b.value; }
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }
  friend bool operator<(const Element& a, const Element& b) { return a.value < b.value; }

  std::variant<Natural, Rational, NameSet, ElementMap> value;
};

class element_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Element::Element(NameSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  value = std::move(s);
}

inline Element::Element(ElementMap m) {
  std::sort(m.begin(), m.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (m[i - 1].first == m[i].first) throw element_error("duplicate key '" + m[i].first + "' in map element");
  }
  value = std::move(m);
}

inline Natural Element::as_natural() const {
  if (const auto* n = std::get_if<Natural>(&value)) return *n;
  throw element_error("element is not a natural number");
}

inline const Rational& Element::as_rational() const {
  if (const auto* q = std::get_if<Rational>(&value)) return *q;
  throw element_error("element is not a rational number");
}

inline const NameSet& Element::as_set() const {
  if (const auto* s = std::get_if<NameSet>(&value)) return *s;
  throw element_error("element is not a set");
}

inline const ElementMap& Element::as_map() const {
  if (const auto* m = std::get_if<ElementMap>(&value)) return *m;
  throw element_error("element is not a map");
}

inline const Element* Element::find(const std::string& key) const {
  const auto& m = as_map();
  auto it = std::lower_bound(m.begin(), m.end(), key,
                             [](const auto& entry, const std::string& k) { return entry.first < k; });
  if (it == m.end() || it->first != key) return nullptr;
  return &it->second;
}

/// Checked addition on naturals.
inline Natural checked_add(Natural a, Natural b) {
  if (a > UINT64_MAX - b) throw std::overflow_error("natural number addition overflows 64 bits");
  return a + b;
}

inline Natural checked_mul(Natural a, Natural b) {
  if (a != 0 && b > UINT64_MAX / a) throw std::overflow_error("natural number multiplication overflows 64 bits");
  return a * b;
}

/// Canonical compact rendering: `3`, `1/2`, `{a,b}`, `{x:2,y:1}`.
inline std::string to_string(const Element& e) {
  switch (e.kind()) {
    case Element::Kind::natural:
      return std::to_string(e.as_natural());
    case Element::Kind::rational: {
      const auto& q = e.as_rational();
      if (denominator(q) == 1) return numerator(q).str();
      return numerator(q).str() + "/" + denominator(q).str();
    }
    case Element::Kind::set: {
      std::string out = "{";
      bool first = true;
      for (const auto& s : e.as_set()) {
        if (!first) out += ",";
        out += s;
        first = false;
      }
      return out + "}";
    }
    case Element::Kind::map: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, v] : e.as_map()) {
        if (!first) out += ",";
        out += k + ":" + to_string(v);
        first = false;
      }
      return out + "}";
    }
  }
  return {};
}

}  // namespace kcons
