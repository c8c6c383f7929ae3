#pragma once

/**
 * @file krelation.hpp
 * @brief Attributes, tuples and finite-support K-relations.
 *
 * A tuple is stored as a vector of domain positions aligned with the sorted
 * attribute names of its AttributeSet, so lexicographic vector order is the
 * canonical tuple order (by attribute name, then by domain-list position).
 */

#include "monoid.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace kcons {

class relation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Domain = std::vector<std::string>;
using DomainMap = std::map<std::string, Domain>;
using Tuple = std::vector<std::uint32_t>;

class AttributeSet {
 public:
  AttributeSet() = default;

  /// names need not be sorted; every name must have a non-empty domain in doms.
  AttributeSet(std::vector<std::string> names, const DomainMap& doms) {
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
      throw relation_error("duplicate attribute name");
    }
    for (const auto& n : names) {
      auto it = doms.find(n);
      if (it == doms.end()) throw relation_error("attribute '" + n + "' has no declared domain");
      if (it->second.empty()) throw relation_error("attribute '" + n + "' has an empty domain");
      domains_.push_back(std::make_shared<const Domain>(it->second));
    }
    names_ = std::move(names);
  }

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const Domain& domain(std::size_t i) const { return *domains_[i]; }

  std::optional<std::size_t> position(const std::string& name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }
  bool contains(const std::string& name) const { return position(name).has_value(); }
  bool includes(const AttributeSet& sub) const {
    return std::includes(names_.begin(), names_.end(), sub.names_.begin(), sub.names_.end());
  }

  /// Positions in *this of the attributes of sub, in sub's order.
  std::vector<std::size_t> positions_of(const AttributeSet& sub) const {
    std::vector<std::size_t> out;
    for (const auto& n : sub.names_) {
      auto p = position(n);
      if (!p) throw relation_error("attribute '" + n + "' is not in {" + joined() + "}");
      out.push_back(*p);
    }
    return out;
  }

  AttributeSet subset(const std::vector<std::string>& names) const {
    AttributeSet out;
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const auto& n : sorted) {
      auto p = position(n);
      if (!p) throw relation_error("attribute '" + n + "' is not in {" + joined() + "}");
      out.names_.push_back(n);
      out.domains_.push_back(domains_[*p]);
    }
    return out;
  }

  AttributeSet unite(const AttributeSet& other) const {
    AttributeSet out;
    std::size_t i = 0, j = 0;
    while (i < size() || j < other.size()) {
      if (j == other.size() || (i < size() && names_[i] < other.names_[j])) {
        out.push(names_[i], domains_[i]);
        ++i;
      } else if (i == size() || other.names_[j] < names_[i]) {
        out.push(other.names_[j], other.domains_[j]);
        ++j;
      } else {
        if (*domains_[i] != *other.domains_[j]) {
          throw relation_error("attribute '" + names_[i] + "' has conflicting domains");
        }
        out.push(names_[i], domains_[i]);
        ++i;
        ++j;
      }
    }
    return out;
  }

  AttributeSet intersect(const AttributeSet& other) const {
    std::vector<std::string> common;
    std::set_intersection(names_.begin(), names_.end(), other.names_.begin(), other.names_.end(),
                          std::back_inserter(common));
    return subset(common);
  }

  std::string joined(const std::string& sep = ",") const {
    std::string s;
    for (std::size_t i = 0; i < names_.size(); ++i) s += (i ? sep : "") + names_[i];
    return s;
  }

  /// Number of tuples over these attributes (saturating).
  std::uint64_t tuple_count() const {
    std::uint64_t n = 1;
    for (const auto& d : domains_) {
      if (n > (UINT64_MAX / d->size())) return UINT64_MAX;
      n *= d->size();
    }
    return n;
  }

  friend bool operator==(const AttributeSet& a, const AttributeSet& b) {
    if (a.names_ != b.names_) return false;
    for (std::size_t i = 0; i < a.domains_.size(); ++i) {
      if (*a.domains_[i] != *b.domains_[i]) return false;
    }
    return true;
  }
  friend bool operator!=(const AttributeSet& a, const AttributeSet& b) { return !(a == b); }

 private:
  void push(const std::string& n, std::shared_ptr<const Domain> d) {
    names_.push_back(n);
    domains_.push_back(std::move(d));
  }

  std::vector<std::string> names_;
  std::vector<std::shared_ptr<const Domain>> domains_;
};

inline Tuple project(const Tuple& t, const std::vector<std::size_t>& positions) {
  Tuple out;
  out.reserve(positions.size());
  for (auto p : positions) out.push_back(t[p]);
  return out;
}

class KRelation {
 public:
  KRelation() = default;
  KRelation(Monoid m, AttributeSet attrs) : monoid_(std::move(m)), attrs_(std::move(attrs)) {}

  const Monoid& monoid() const { return monoid_; }
  const AttributeSet& attrs() const { return attrs_; }
  const std::map<Tuple, Element>& annotations() const { return ann_; }
  std::size_t support_size() const { return ann_.size(); }
  bool empty() const { return ann_.empty(); }

  Element at(const Tuple& t) const {
    auto it = ann_.find(t);
    return it == ann_.end() ? monoid_.zero() : it->second;
  }

  /// Sets R(t) := v; zero annotations are dropped.
  void set(const Tuple& t, Element v) {
    check_tuple(t);
    if (!monoid_.contains(v)) throw relation_error("annotation " + to_string(v) + " is not in " + monoid_.name());
    if (monoid_.is_zero(v)) {
      ann_.erase(t);
    } else {
      ann_[t] = std::move(v);
    }
  }

  /// R(t) := R(t) + v.
  void accumulate(const Tuple& t, const Element& v) { set(t, monoid_.add(at(t), v)); }

  /// Tuple from named values, e.g. {{"A","a1"},{"B","b2"}}.
  Tuple tuple(const std::map<std::string, std::string>& values) const {
    if (values.size() != attrs_.size()) throw relation_error("tuple must assign exactly {" + attrs_.joined() + "}");
    Tuple t;
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
      auto it = values.find(attrs_.names()[i]);
      if (it == values.end()) throw relation_error("tuple misses attribute '" + attrs_.names()[i] + "'");
      const auto& dom = attrs_.domain(i);
      auto pos = std::find(dom.begin(), dom.end(), it->second);
      if (pos == dom.end()) {
        throw relation_error("value '" + it->second + "' is not in the domain of '" + attrs_.names()[i] + "'");
      }
      t.push_back(static_cast<std::uint32_t>(pos - dom.begin()));
    }
    return t;
  }

  std::map<std::string, std::string> values(const Tuple& t) const {
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < attrs_.size(); ++i) out[attrs_.names()[i]] = attrs_.domain(i)[t[i]];
    return out;
  }

  std::string describe(const Tuple& t) const {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + attrs_.domain(i)[t[i]];
    return s + ")";
  }

  friend bool operator==(const KRelation& a, const KRelation& b) {
    return a.attrs_ == b.attrs_ && a.ann_ == b.ann_;
  }
  friend bool operator!=(const KRelation& a, const KRelation& b) { return !(a == b); }

 private:
  void check_tuple(const Tuple& t) const {
    if (t.size() != attrs_.size()) throw relation_error("tuple arity does not match {" + attrs_.joined() + "}");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] >= attrs_.domain(i).size()) throw relation_error("tuple value outside the domain of " + attrs_.names()[i]);
    }
  }

  Monoid monoid_;
  AttributeSet attrs_;
  std::map<Tuple, Element> ann_;
};

/// Supp(R): the stored tuple keys, in canonical order.
inline std::set<Tuple> support(const KRelation& r) {
  std::set<Tuple> out;
  for (const auto& [t, v] : r.annotations()) out.insert(t);
  return out;
}

/// Projection of an ordinary relation over attrs onto the subset y.
inline std::set<Tuple> project_support(const std::set<Tuple>& rel, const AttributeSet& attrs, const AttributeSet& y) {
  const auto pos = attrs.positions_of(y);
  std::set<Tuple> out;
  for (const auto& t : rel) out.insert(project(t, pos));
  return out;
}

/// R[Y]: sums of annotations over tuples agreeing on Y.
inline KRelation marginal(const KRelation& r, const AttributeSet& y) {
  if (!r.attrs().includes(y)) {
    throw relation_error("{" + y.joined() + "} is not a subset of {" + r.attrs().joined() + "}");
  }
  const auto pos = r.attrs().positions_of(y);
  const Monoid& m = r.monoid();
  std::map<Tuple, Element> acc;
  for (const auto& [t, v] : r.annotations()) {
    auto key = project(t, pos);
    auto it = acc.find(key);
    if (it == acc.end()) {
      acc.emplace(std::move(key), v);
    } else {
      it->second = m.add(it->second, v);
    }
  }
  KRelation out(m, r.attrs().subset(y.names()));
  for (auto& [t, v] : acc) out.set(t, std::move(v));
  return out;
}

inline KRelation marginal(const KRelation& r, const std::vector<std::string>& names) {
  return marginal(r, r.attrs().subset(names));
}

/// R[∅](()), the total mass of R.
inline Element total(const KRelation& r) { return marginal(r, AttributeSet{}).at(Tuple{}); }

struct InnerConsistency {
  bool consistent = false;
  KRelation left;   ///< R[X ∩ Y]
  KRelation right;  ///< S[X ∩ Y]
};

inline InnerConsistency inner_consistent(const KRelation& r, const KRelation& s) {
  if (!r.monoid().same_as(s.monoid())) {
    throw relation_error("monoid mismatch: " + r.monoid().name() + " vs " + s.monoid().name());
  }
  const AttributeSet z = r.attrs().intersect(s.attrs());
  InnerConsistency out;
  out.left = marginal(r, z);
  out.right = marginal(s, s.attrs().subset(z.names()));
  out.consistent = out.left == out.right;
  return out;
}

/// Def of witness: W[attrs(R_i)] = R_i for every part.
inline bool verify_witness(const KRelation& w, const std::vector<KRelation>& parts) {
  AttributeSet all;
  for (const auto& p : parts) all = all.unite(p.attrs());
  if (all.names() != w.attrs().names()) {
    throw relation_error("witness attributes {" + w.attrs().joined() + "} differ from the union {" + all.joined() +
                         "}");
  }
  for (const auto& p : parts) {
    if (!p.monoid().same_as(w.monoid())) return false;
    if (marginal(w, p.attrs()) != p) return false;
  }
  return true;
}

/// Enumerates every tuple over attrs in canonical order; f returns false to stop.
template <class F>
void for_each_tuple(const AttributeSet& attrs, F f) {
  Tuple t(attrs.size(), 0);
  while (true) {
    if (!f(static_cast<const Tuple&>(t))) return;
    std::size_t i = attrs.size();
    while (i > 0) {
      --i;
      if (++t[i] < attrs.domain(i).size()) break;
      t[i] = 0;
      if (i == 0) return;
    }
    if (attrs.size() == 0) return;
  }
}

/// Relation over attrs pulled back from a relation over a subset (used by chase and lifts).
inline Tuple merge_tuple(const AttributeSet& target, const AttributeSet& a, const Tuple& ta, const AttributeSet& b,
                         const Tuple& tb) {
  Tuple out(target.size(), 0);
  const auto pa = target.positions_of(a);
  const auto pb = target.positions_of(b);
  for (std::size_t i = 0; i < pa.size(); ++i) out[pa[i]] = ta[i];
  for (std::size_t i = 0; i < pb.size(); ++i) out[pb[i]] = tb[i];
  return out;
}

}  // namespace kcons
