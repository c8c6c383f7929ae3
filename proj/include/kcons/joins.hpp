#pragma once

/**
 * @file joins.hpp
 * @brief Witness-producing joins of two K-relations.
 *
 * standard:      W(t) = R(t[X]) × S(t[Y])
 * vorobev:       W(t) = R(t[X]) × S(t[Y]) / R(t[X ∩ Y])
 * northwest:     one transportation block per shared tuple, solved by NW
 * componentwise: encode power annotations with an index attribute, join
 *                over the base monoid, decode
 * exhaustive:    blocks solved by finite backtracking
 */

#include "krelation.hpp"
#include "transport.hpp"

#include <functional>
#include <optional>
#include <string>

namespace kcons {

class join_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class JoinMethod { standard, vorobev, northwest, componentwise, exhaustive };

inline const char* to_string(JoinMethod m) {
  switch (m) {
    case JoinMethod::standard: return "standard";
    case JoinMethod::vorobev: return "vorobev";
    case JoinMethod::northwest: return "northwest";
    case JoinMethod::componentwise: return "componentwise";
    case JoinMethod::exhaustive: return "exhaustive";
  }
  return "";
}

inline JoinMethod parse_join_method(const std::string& s) {
  for (auto m : {JoinMethod::standard, JoinMethod::vorobev, JoinMethod::northwest, JoinMethod::componentwise,
                 JoinMethod::exhaustive}) {
    if (s == to_string(m)) return m;
  }
  throw join_error("unknown join method '" + s + "'");
}

namespace detail {

/// S's support grouped by projection on the common attributes.
inline std::map<Tuple, std::vector<Tuple>> group_by(const KRelation& r, const AttributeSet& z) {
  const auto pos = r.attrs().positions_of(z);
  std::map<Tuple, std::vector<Tuple>> out;
  for (const auto& [t, v] : r.annotations()) out[project(t, pos)].push_back(t);
  return out;
}

inline void require_same_monoid(const KRelation& r, const KRelation& s) {
  if (!r.monoid().same_as(s.monoid())) {
    throw join_error("monoid mismatch: " + r.monoid().name() + " vs " + s.monoid().name());
  }
}

}  // namespace detail

inline KRelation standard_join(const KRelation& r, const KRelation& s) {
  detail::require_same_monoid(r, s);
  const Monoid& m = r.monoid();
  if (!m.caps().semiring) throw capability_error(m.name() + " is not a semiring");
  const AttributeSet z = r.attrs().intersect(s.attrs());
  const AttributeSet xy = r.attrs().unite(s.attrs());
  KRelation w(m, xy);
  const auto rg = detail::group_by(r, z);
  const auto sg = detail::group_by(s, z);
  for (const auto& [key, rt] : rg) {
    auto it = sg.find(key);
    if (it == sg.end()) continue;
    for (const auto& a : rt) {
      for (const auto& b : it->second) {
        w.set(merge_tuple(xy, r.attrs(), a, s.attrs(), b), m.multiply(r.at(a), s.at(b)));
      }
    }
  }
  return w;
}

inline KRelation vorobev_join(const KRelation& r, const KRelation& s) {
  detail::require_same_monoid(r, s);
  const Monoid& m = r.monoid();
  if (!m.caps().semifield) throw capability_error(m.name() + " is not a semifield");
  const auto ic = inner_consistent(r, s);
  if (!ic.consistent) throw join_error("relations are not inner consistent");
  const AttributeSet z = r.attrs().intersect(s.attrs());
  const AttributeSet xy = r.attrs().unite(s.attrs());
  KRelation w(m, xy);
  const auto rg = detail::group_by(r, z);
  const auto sg = detail::group_by(s, z);
  for (const auto& [key, rt] : rg) {
    auto it = sg.find(key);
    if (it == sg.end()) continue;
    const Element shared = ic.left.at(key);
    for (const auto& a : rt) {
      for (const auto& b : it->second) {
        w.set(merge_tuple(xy, r.attrs(), a, s.attrs(), b), m.divide(m.multiply(r.at(a), s.at(b)), shared));
      }
    }
  }
  return w;
}

using BlockSolver = std::function<TransportResult(const TransportInstance&)>;

struct BlockJoin {
  bool ok = false;
  bool inner = false;            ///< inner consistency held
  KRelation witness;             ///< valid when ok
  std::optional<Tuple> failed;   ///< shared tuple whose block failed
  TransportStatus status = TransportStatus::solved;
  std::string method;
  std::uint64_t nodes = 0;
};

/**
 * For every tuple w of the shared marginal's support, solve the block with
 * b = R's extensions of w and c = S's extensions of w, and place x_ij on
 * the merged tuple. Blocks follow the canonical tuple order.
 */
inline BlockJoin block_join(const KRelation& r, const KRelation& s, const BlockSolver& solver) {
  detail::require_same_monoid(r, s);
  const Monoid& m = r.monoid();
  BlockJoin out;
  const auto ic = inner_consistent(r, s);
  out.inner = ic.consistent;
  if (!ic.consistent) return out;
  const AttributeSet z = r.attrs().intersect(s.attrs());
  const AttributeSet xy = r.attrs().unite(s.attrs());
  KRelation w(m, xy);
  const auto rg = detail::group_by(r, z);
  const auto sg = detail::group_by(s, z);
  for (const auto& [key, rows] : rg) {
    const auto& cols = sg.at(key);
    TransportInstance inst{m, {}, {}};
    for (const auto& a : rows) inst.b.push_back(r.at(a));
    for (const auto& b : cols) inst.c.push_back(s.at(b));
    const TransportResult res = solver(inst);
    out.nodes += res.nodes;
    if (out.method.empty()) out.method = res.method;
    if (res.status != TransportStatus::solved) {
      out.failed = key;
      out.status = res.status;
      return out;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        w.set(merge_tuple(xy, r.attrs(), rows[i], s.attrs(), cols[j]), res.d[i][j]);
      }
    }
  }
  out.ok = true;
  out.witness = std::move(w);
  return out;
}

inline KRelation northwest_join(const KRelation& r, const KRelation& s) {
  if (!r.monoid().northwest_capable()) {
    throw capability_error(r.monoid().name() + " is not weakly cancellative and totally preordered");
  }
  auto res = block_join(r, s, [](const TransportInstance& inst) {
    TransportResult t;
    t.method = "northwest";
    t.d = solve_northwest(inst);
    t.status = TransportStatus::solved;
    return t;
  });
  if (!res.inner) throw join_error("relations are not inner consistent");
  return std::move(res.witness);
}

inline KRelation exhaustive_join(const KRelation& r, const KRelation& s, std::uint64_t budget = default_budget) {
  auto res = block_join(r, s, [budget](const TransportInstance& inst) { return solve_exhaustive(inst, budget); });
  if (!res.inner) throw join_error("relations are not inner consistent");
  if (!res.ok) throw join_error(std::string("block ") + (res.status == TransportStatus::budget_exceeded
                                                            ? "exceeded the search budget"
                                                            : "is infeasible"));
  return std::move(res.witness);
}

inline KRelation join(const KRelation& r, const KRelation& s, JoinMethod method);

/// The witnessing join used for a monoid when no method is requested.
inline std::optional<JoinMethod> default_join_method(const Monoid& m) {
  const auto& c = m.caps();
  if (c.lattice) return JoinMethod::standard;
  if (m.northwest_capable()) return JoinMethod::northwest;
  if (c.semifield) return JoinMethod::vorobev;
  if (c.power && m.power_base() != nullptr && default_join_method(*m.power_base())) return JoinMethod::componentwise;
  if (c.finite) return JoinMethod::exhaustive;
  return std::nullopt;
}

/// Name of the extra attribute carrying the index key in the encoding.
inline const std::string component_attribute = "#component";

/**
 * R_0(r, i) := R(r)(i) over the base monoid; join with northwest corner
 * when the base allows it (sparse witnesses), else the base's default method;
 * decode W(t)(i) := W_0(t, i).
 */
inline KRelation componentwise_join(const KRelation& r, const KRelation& s) {
  detail::require_same_monoid(r, s);
  const Monoid& m = r.monoid();
  const Monoid* base = m.power_base();
  if (!m.caps().power || base == nullptr) throw capability_error(m.name() + " is not a finite-support power");
  const auto base_method =
      base->northwest_capable() ? std::optional<JoinMethod>(JoinMethod::northwest) : default_join_method(*base);
  if (!base_method) throw capability_error("base monoid " + base->name() + " has no witnessing join");
  if (r.attrs().contains(component_attribute) || s.attrs().contains(component_attribute)) {
    throw join_error("attribute name '" + component_attribute + "' is reserved");
  }
  if (!inner_consistent(r, s).consistent) throw join_error("relations are not inner consistent");

  std::set<std::string> keys;
  for (const auto* rel : {&r, &s}) {
    for (const auto& [t, v] : rel->annotations()) {
      for (const auto& [k, x] : v.as_map()) keys.insert(k);
    }
  }
  DomainMap doms;
  doms[component_attribute] = Domain(keys.begin(), keys.end());
  if (keys.empty()) doms[component_attribute] = Domain{""};
  const auto encode = [&](const KRelation& rel) {
    for (std::size_t i = 0; i < rel.attrs().size(); ++i) doms[rel.attrs().names()[i]] = rel.attrs().domain(i);
    std::vector<std::string> names = rel.attrs().names();
    names.push_back(component_attribute);
    AttributeSet a(names, doms);
    KRelation out(*base, a);
    const auto cpos = *a.position(component_attribute);
    const auto pos = a.positions_of(rel.attrs());
    const auto& kd = a.domain(cpos);
    for (const auto& [t, v] : rel.annotations()) {
      for (const auto& [k, x] : v.as_map()) {
        Tuple u(a.size());
        for (std::size_t i = 0; i < pos.size(); ++i) u[pos[i]] = t[i];
        u[cpos] = static_cast<std::uint32_t>(std::lower_bound(kd.begin(), kd.end(), k) - kd.begin());
        out.set(u, x);
      }
    }
    return out;
  };
  const KRelation r0 = encode(r);
  const KRelation s0 = encode(s);
  const KRelation w0 = join(r0, s0, *base_method);

  const AttributeSet xy = r.attrs().unite(s.attrs());
  const auto pos = w0.attrs().positions_of(xy);
  const auto cpos = *w0.attrs().position(component_attribute);
  const auto& kd = w0.attrs().domain(cpos);
  std::map<Tuple, ElementMap> acc;
  for (const auto& [t, v] : w0.annotations()) acc[project(t, pos)].emplace_back(kd[t[cpos]], v);
  KRelation w(m, xy);
  for (auto& [t, comps] : acc) w.set(t, Element(std::move(comps)));
  return w;
}

inline KRelation join(const KRelation& r, const KRelation& s, JoinMethod method) {
  switch (method) {
    case JoinMethod::standard: return standard_join(r, s);
    case JoinMethod::vorobev: return vorobev_join(r, s);
    case JoinMethod::northwest: return northwest_join(r, s);
    case JoinMethod::componentwise: return componentwise_join(r, s);
    case JoinMethod::exhaustive: return exhaustive_join(r, s);
  }
  throw join_error("unknown join method");
}

}  // namespace kcons
