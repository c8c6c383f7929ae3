#pragma once

/**
 * @file consistency.hpp
 * @brief Pairwise, k-wise and global consistency deciders, the acyclic
 * chase, the P3 reduction of transportation instances and the mod-d
 * counterexample generator for cyclic schemas.
 */

#include "hypergraph.hpp"
#include "joins.hpp"

#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kcons {

class consistency_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Outcome { consistent, inconsistent, undecidable, budget_exceeded };

enum class Reason {
  none,
  inner_inconsistency,
  transport_infeasible,
  exhaustive_exhausted,
  empty_candidate_support,
  no_solver,
};

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::consistent: return "consistent";
    case Outcome::inconsistent: return "inconsistent";
    case Outcome::undecidable: return "undecidable-here";
    case Outcome::budget_exceeded: return "budget-exceeded";
  }
  return "";
}

inline const char* to_string(Reason r) {
  switch (r) {
    case Reason::none: return "none";
    case Reason::inner_inconsistency: return "inner-inconsistency";
    case Reason::transport_infeasible: return "transport-infeasible";
    case Reason::exhaustive_exhausted: return "exhaustive-exhausted";
    case Reason::empty_candidate_support: return "empty-candidate-support";
    case Reason::no_solver: return "no-solver";
  }
  return "";
}

using IndexSet = std::vector<int>;

struct Verdict {
  std::string level;  ///< "pairwise", "k-wise" or "global"
  int k = 0;
  Outcome outcome = Outcome::consistent;
  std::vector<std::pair<IndexSet, KRelation>> witnesses;

  // when not consistent
  IndexSet failing;
  Reason reason = Reason::none;
  std::optional<Tuple> block;   ///< shared tuple of the infeasible block
  std::string block_label;

  // audit trail
  std::string method;
  std::uint64_t nodes = 0;
  std::size_t candidates = 0;   ///< candidate witness support size (q >= 3 search)
  std::string search_space;     ///< e.g. "3^7"
};

/// Hypergraph whose vertices are the attributes and whose edges are the relation schemas.
inline Hypergraph schema_of(const std::vector<KRelation>& rels) {
  std::set<std::string> names;
  std::vector<std::vector<std::string>> edges;
  for (const auto& r : rels) {
    names.insert(r.attrs().names().begin(), r.attrs().names().end());
    edges.push_back(r.attrs().names());
  }
  return Hypergraph(std::vector<std::string>(names.begin(), names.end()), edges);
}

inline std::vector<KRelation> pick(const std::vector<KRelation>& rels, const IndexSet& idx) {
  std::vector<KRelation> out;
  for (int i : idx) out.push_back(rels.at(i));
  return out;
}

inline Verdict check_pair(const KRelation& r, const KRelation& s, std::uint64_t budget = default_budget) {
  if (!r.monoid().same_as(s.monoid())) {
    throw consistency_error("monoid mismatch: " + r.monoid().name() + " vs " + s.monoid().name());
  }
  Verdict v;
  v.level = "pairwise";
  v.k = 2;
  v.failing = {0, 1};
  const Monoid& m = r.monoid();
  const std::string method = transport_method(m);
  if (!inner_consistent(r, s).consistent) {
    v.outcome = Outcome::inconsistent;
    v.reason = Reason::inner_inconsistency;
    v.method = "marginals";
    return v;
  }
  if (method.empty()) {
    v.outcome = Outcome::undecidable;
    v.reason = Reason::no_solver;
    return v;
  }
  const BlockJoin bj =
      block_join(r, s, [budget](const TransportInstance& inst) { return solve_best(inst, budget); });
  v.method = bj.method.empty() ? method : bj.method;
  v.nodes = bj.nodes;
  if (!bj.ok) {
    v.outcome = bj.status == TransportStatus::budget_exceeded ? Outcome::budget_exceeded : Outcome::inconsistent;
    v.reason = bj.status == TransportStatus::budget_exceeded ? Reason::none : Reason::transport_infeasible;
    v.block = bj.failed;
    const AttributeSet z = r.attrs().intersect(s.attrs());
    std::string label = "(";
    for (std::size_t i = 0; bj.failed && i < bj.failed->size(); ++i) {
      label += (i ? "," : "") + z.names()[i] + "=" + z.domain(i)[(*bj.failed)[i]];
    }
    v.block_label = label + ")";
    return v;
  }
  if (!verify_witness(bj.witness, {r, s})) throw consistency_error("assembled pair witness failed to verify");
  v.failing.clear();
  v.witnesses.push_back({{0, 1}, bj.witness});
  return v;
}

/**
 * Tuples over the union of the schemas whose projection on every schema
 * lies in that relation's support (the join of the supports). nullopt when
 * an intermediate result exceeds the budget.
 */
inline std::optional<std::pair<AttributeSet, std::vector<Tuple>>> candidate_support(const std::vector<KRelation>& rels,
                                                                                   std::uint64_t budget) {
  AttributeSet acc;
  std::vector<Tuple> tuples{Tuple{}};
  std::vector<char> used(rels.size(), 0);
  for (std::size_t step = 0; step < rels.size(); ++step) {
    // next relation: most attributes shared with what is joined so far, lowest index on ties
    std::size_t best = rels.size();
    std::size_t best_overlap = 0;
    for (std::size_t i = 0; i < rels.size(); ++i) {
      if (used[i]) continue;
      const std::size_t ov = acc.intersect(rels[i].attrs()).size();
      if (best == rels.size() || ov > best_overlap) {
        best = i;
        best_overlap = ov;
      }
    }
    used[best] = 1;
    const KRelation& r = rels[best];
    const AttributeSet z = acc.intersect(r.attrs());
    const AttributeSet next = acc.unite(r.attrs());
    std::map<Tuple, std::vector<Tuple>> groups;
    const auto rz = r.attrs().positions_of(z);
    for (const auto& [t, v] : r.annotations()) groups[project(t, rz)].push_back(t);
    const auto az = acc.positions_of(z);
    std::vector<Tuple> out;
    for (const auto& t : tuples) {
      auto it = groups.find(project(t, az));
      if (it == groups.end()) continue;
      for (const auto& u : it->second) {
        out.push_back(merge_tuple(next, acc, t, r.attrs(), u));
        if (out.size() > budget) return std::nullopt;
      }
    }
    acc = next;
    tuples = std::move(out);
    if (tuples.empty()) break;
  }
  AttributeSet all;
  for (const auto& r : rels) all = all.unite(r.attrs());
  if (tuples.empty()) return std::make_pair(all, std::vector<Tuple>{});
  std::sort(tuples.begin(), tuples.end());
  return std::make_pair(all, tuples);
}

namespace detail {

struct Constraint {
  std::vector<int> vars;
  Element target;
  Element partial;
  int remaining = 0;
};

/// Backtracking over one connected component; assignment is written into `value`.
inline Outcome search_component(const Monoid& m, const std::vector<int>& vars,
                                const std::vector<std::vector<Element>>& domain,
                                const std::vector<std::vector<int>>& var_constraints, std::vector<Constraint>& cons,
                                std::vector<Element>& value, std::uint64_t& nodes, std::uint64_t budget) {
  const bool prune = m.caps().preorder;
  std::vector<std::size_t> choice(vars.size(), 0);
  std::vector<std::vector<Element>> saved(vars.size());
  std::size_t pos = 0;
  bool resumed = false;
  while (true) {
    if (pos == vars.size()) return Outcome::consistent;
    const int x = vars[pos];
    if (resumed) {
      // undo the previous choice at this position
      const auto& cs = var_constraints[x];
      for (std::size_t q = 0; q < cs.size(); ++q) {
        cons[cs[q]].partial = saved[pos][q];
        ++cons[cs[q]].remaining;
      }
      ++choice[pos];
    }
    bool placed = false;
    while (choice[pos] < domain[x].size()) {
      if (++nodes > budget) return Outcome::budget_exceeded;
      const Element& val = domain[x][choice[pos]];
      bool ok = true;
      for (int c : var_constraints[x]) {
        const Element p = m.add(cons[c].partial, val);
        const bool last = cons[c].remaining == 1;
        if (last ? p != cons[c].target : (prune && !m.leq(p, cons[c].target))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        saved[pos].clear();
        for (int c : var_constraints[x]) {
          saved[pos].push_back(cons[c].partial);
          cons[c].partial = m.add(cons[c].partial, val);
          --cons[c].remaining;
        }
        value[x] = val;
        placed = true;
        break;
      }
      ++choice[pos];
    }
    if (placed) {
      ++pos;
      resumed = false;
      if (pos < vars.size()) choice[pos] = 0;
      continue;
    }
    if (pos == 0) return Outcome::inconsistent;
    --pos;
    resumed = true;
  }
}

}  // namespace detail

/**
 * Exhaustive witness search over the candidate support. Each candidate
 * tuple is a variable; each support tuple of each relation is an equation
 * "sum of the variables projecting onto it = its annotation". Connected
 * components of the equation system are searched independently.
 */
inline Verdict global_search(const std::vector<KRelation>& rels, std::uint64_t budget = default_budget) {
  Verdict v;
  v.level = "global";
  v.k = static_cast<int>(rels.size());
  v.method = "candidate-support-search";
  IndexSet all(rels.size());
  std::iota(all.begin(), all.end(), 0);
  const Monoid& m = rels.front().monoid();
  const auto cand = candidate_support(rels, budget);
  if (!cand) {
    v.outcome = Outcome::budget_exceeded;
    v.failing = all;
    return v;
  }
  const auto& [attrs, tuples] = *cand;
  v.candidates = tuples.size();
  const bool all_empty = std::all_of(rels.begin(), rels.end(), [](const KRelation& r) { return r.empty(); });
  if (tuples.empty() && !all_empty) {
    v.outcome = Outcome::inconsistent;
    v.reason = Reason::empty_candidate_support;
    v.failing = all;
    v.search_space = "0";
    return v;
  }

  // equations
  std::vector<detail::Constraint> cons;
  std::vector<std::vector<int>> var_cons(tuples.size());
  for (const auto& r : rels) {
    const auto pos = attrs.positions_of(r.attrs());
    std::map<Tuple, int> index;
    for (const auto& [t, val] : r.annotations()) {
      index[t] = static_cast<int>(cons.size());
      cons.push_back({{}, val, m.zero(), 0});
    }
    for (std::size_t x = 0; x < tuples.size(); ++x) {
      const int c = index.at(project(tuples[x], pos));
      cons[c].vars.push_back(static_cast<int>(x));
      ++cons[c].remaining;
      var_cons[x].push_back(c);
    }
  }
  for (const auto& c : cons) {
    if (c.vars.empty()) {
      v.outcome = Outcome::inconsistent;
      v.reason = Reason::exhaustive_exhausted;
      v.failing = all;
      return v;
    }
  }

  // value domains
  std::vector<std::vector<Element>> domain(tuples.size());
  const auto& caps = m.caps();
  std::vector<Element> universe;
  if (caps.finite) {
    universe = m.elements();
    v.search_space = std::to_string(universe.size()) + "^" + std::to_string(tuples.size());
  } else if (!caps.downsets || !caps.preorder) {
    v.outcome = Outcome::undecidable;
    v.reason = Reason::no_solver;
    v.failing = all;
    return v;
  }
  for (std::size_t x = 0; x < tuples.size(); ++x) {
    const std::vector<Element> base = caps.finite ? universe : m.downset(cons[var_cons[x].front()].target);
    for (const auto& e : base) {
      bool ok = true;
      for (int c : var_cons[x]) {
        if (caps.preorder && !m.leq(e, cons[c].target)) {
          ok = false;
          break;
        }
      }
      if (ok) domain[x].push_back(e);
    }
  }
  if (!caps.finite) {
    std::string s;
    for (std::size_t x = 0; x < tuples.size(); ++x) s += (x ? "*" : "") + std::to_string(domain[x].size());
    v.search_space = s;
  }

  // connected components of the equation system
  std::vector<int> comp(tuples.size(), -1);
  int ncomp = 0;
  for (std::size_t x = 0; x < tuples.size(); ++x) {
    if (comp[x] != -1) continue;
    std::vector<int> stack{static_cast<int>(x)};
    comp[x] = ncomp;
    while (!stack.empty()) {
      const int y = stack.back();
      stack.pop_back();
      for (int c : var_cons[y]) {
        for (int z : cons[c].vars) {
          if (comp[z] == -1) {
            comp[z] = ncomp;
            stack.push_back(z);
          }
        }
      }
    }
    ++ncomp;
  }
  std::vector<Element> value(tuples.size(), m.zero());
  for (int k = 0; k < ncomp; ++k) {
    std::vector<int> vars;
    for (std::size_t x = 0; x < tuples.size(); ++x) {
      if (comp[x] == k) vars.push_back(static_cast<int>(x));
    }
    const Outcome o = detail::search_component(m, vars, domain, var_cons, cons, value, v.nodes, budget);
    if (o != Outcome::consistent) {
      v.outcome = o;
      v.reason = o == Outcome::inconsistent ? Reason::exhaustive_exhausted : Reason::none;
      v.failing = all;
      return v;
    }
  }
  KRelation w(m, attrs);
  for (std::size_t x = 0; x < tuples.size(); ++x) w.set(tuples[x], value[x]);
  if (!verify_witness(w, rels)) throw consistency_error("global search produced an invalid witness");
  v.witnesses.push_back({all, std::move(w)});
  return v;
}

/**
 * T_1 := R_1, T_i := T_{i-1} joined with R_i along the running-intersection
 * listing, using block transportation solves. Relation i lives on edge i.
 */
inline KRelation chase_acyclic(const std::vector<KRelation>& rels, const AcyclicityCertificate& cert,
                               std::uint64_t budget = default_budget) {
  if (!cert.acyclic) throw consistency_error("chase needs an acyclic certificate");
  if (rels.empty()) throw consistency_error("chase needs at least one relation");
  if (cert.order.size() != rels.size()) throw consistency_error("certificate does not match the relations");
  const Monoid& m = rels.front().monoid();
  if (rels.size() > 1 && !m.has_transport_property()) {
    throw capability_error(m.name() + " has no declared witnessing join for the chase");
  }
  KRelation t = rels[cert.order[0]];
  for (std::size_t i = 1; i < cert.order.size(); ++i) {
    const KRelation& r = rels[cert.order[i]];
    const BlockJoin bj =
        block_join(t, r, [budget](const TransportInstance& inst) { return solve_best(inst, budget); });
    if (!bj.inner) {
      throw consistency_error("chase step " + std::to_string(i + 1) + " fails inner consistency");
    }
    if (!bj.ok) throw consistency_error("chase step " + std::to_string(i + 1) + " has an unsolvable block");
    t = bj.witness;
  }
  if (!verify_witness(t, rels)) throw consistency_error("chase result does not reproduce the inputs");
  return t;
}

inline KRelation chase_acyclic(const std::vector<KRelation>& rels, std::uint64_t budget = default_budget) {
  const Hypergraph h = schema_of(rels);
  return chase_acyclic(rels, check_acyclic(h), budget);
}

namespace detail {

/// Decides a subcollection of size >= 3 whose pairs are already known consistent.
inline Verdict decide_subset(const std::vector<KRelation>& sub, std::uint64_t budget) {
  const Monoid& m = sub.front().monoid();
  const bool named = std::all_of(sub.begin(), sub.end(), [](const KRelation& r) { return !r.attrs().empty(); });
  if (named && m.has_transport_property()) {
    const Hypergraph h = schema_of(sub);
    const AcyclicityCertificate cert = check_acyclic(h);
    if (cert.acyclic) {
      Verdict v;
      v.level = "global";
      v.k = static_cast<int>(sub.size());
      v.method = "chase";
      IndexSet all(sub.size());
      std::iota(all.begin(), all.end(), 0);
      try {
        v.witnesses.push_back({all, chase_acyclic(sub, cert, budget)});
      } catch (const consistency_error&) {
        v.outcome = Outcome::inconsistent;
        v.reason = Reason::inner_inconsistency;
        v.failing = all;
      }
      return v;
    }
  }
  return global_search(sub, budget);
}

inline IndexSet remap(const IndexSet& local, const IndexSet& global) {
  IndexSet out;
  for (int i : local) out.push_back(global[i]);
  return out;
}

}  // namespace detail

/// Every subcollection of size <= k, by increasing size and lexicographic order.
inline Verdict check_kwise(const std::vector<KRelation>& rels, int k, std::uint64_t budget = default_budget) {
  const int m = static_cast<int>(rels.size());
  if (k < 1 || k > m) throw consistency_error("k must satisfy 1 <= k <= number of relations");
  for (std::size_t i = 1; i < rels.size(); ++i) {
    if (!rels[i].monoid().same_as(rels[0].monoid())) throw consistency_error("relations use different monoids");
  }
  Verdict out;
  out.level = k == 2 ? "pairwise" : "k-wise";
  out.k = k;
  std::optional<Verdict> pending;  // first undecided subset
  for (int q = 1; q <= k; ++q) {
    IndexSet idx(q);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      Verdict v;
      if (q == 1) {
        v.witnesses.push_back({{0}, rels[idx[0]]});
      } else if (q == 2) {
        v = check_pair(rels[idx[0]], rels[idx[1]], budget);
      } else {
        v = detail::decide_subset(pick(rels, idx), budget);
      }
      out.nodes += v.nodes;
      if (v.outcome == Outcome::consistent) {
        for (auto& [sub, w] : v.witnesses) out.witnesses.push_back({detail::remap(sub, idx), std::move(w)});
        if (out.method.empty() && !v.method.empty()) out.method = v.method;
      } else {
        v.failing = idx;
        if (v.outcome == Outcome::inconsistent) {
          v.level = out.level;
          v.k = k;
          v.nodes = out.nodes;
          v.witnesses.clear();
          return v;
        }
        if (!pending) pending = v;
      }
      // next combination
      int i = q - 1;
      while (i >= 0 && idx[i] == m - q + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < q; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  if (pending) {
    pending->level = out.level;
    pending->k = k;
    pending->witnesses.clear();
    return *pending;
  }
  return out;
}

/// Pairs first, then the whole collection (chase on acyclic schemas with the transportation property, search otherwise).
inline Verdict check_global(const std::vector<KRelation>& rels, std::uint64_t budget = default_budget) {
  const int m = static_cast<int>(rels.size());
  if (m == 0) throw consistency_error("no relations");
  if (m <= 2) {
    Verdict v = check_kwise(rels, m, budget);
    v.level = "global";
    if (v.outcome == Outcome::consistent && m == 2) {
      // keep only the full witness
      std::vector<std::pair<IndexSet, KRelation>> keep;
      for (auto& p : v.witnesses) {
        if (p.first.size() == 2) keep.push_back(std::move(p));
      }
      v.witnesses = std::move(keep);
    }
    return v;
  }
  Verdict pairs = check_kwise(rels, 2, budget);
  if (pairs.outcome == Outcome::inconsistent) {
    pairs.level = "global";
    pairs.k = m;
    return pairs;
  }
  Verdict v = detail::decide_subset(rels, budget);
  v.nodes += pairs.nodes;
  v.k = m;
  v.level = "global";
  return v;
}

/**
 * Builds R(AB), S(BC), T(CD) from a balanced instance, decides their global
 * consistency and reads d_ij off the witness at (u_i, 0, 0, v_j).
 */
inline TransportResult transport_via_p3(const TransportInstance& inst, std::uint64_t budget = default_budget) {
  TransportResult res;
  res.method = "p3";
  const Monoid& m = inst.monoid;
  if (inst.b.empty() || inst.c.empty()) throw transport_error("transport instance needs m >= 1 and n >= 1");
  if (!is_balanced(inst)) {
    res.status = TransportStatus::unbalanced;
    return res;
  }
  const std::size_t rows = inst.b.size(), cols = inst.c.size();
  const Element a = m.sum(inst.b);
  if (m.is_zero(a)) {
    res.status = TransportStatus::solved;
    res.d.assign(rows, std::vector<Element>(cols, m.zero()));
    return res;
  }
  Domain ad;
  for (std::size_t i = 0; i < rows; ++i) ad.push_back("u" + std::to_string(i + 1));
  for (std::size_t j = 0; j < cols; ++j) ad.push_back("v" + std::to_string(j + 1));
  const DomainMap doms{{"A", ad}, {"B", {"0", "1"}}, {"C", {"0", "1"}}, {"D", ad}};
  KRelation r(m, AttributeSet({"A", "B"}, doms));
  KRelation s(m, AttributeSet({"B", "C"}, doms));
  KRelation t(m, AttributeSet({"C", "D"}, doms));
  const auto u = [](std::size_t i) { return static_cast<std::uint32_t>(i); };
  const auto vj = [&](std::size_t j) { return static_cast<std::uint32_t>(rows + j); };
  for (std::size_t i = 0; i < rows; ++i) {
    r.set({u(i), 0}, inst.b[i]);
    t.set({1, u(i)}, inst.b[i]);
  }
  for (std::size_t j = 0; j < cols; ++j) {
    r.set({vj(j), 1}, inst.c[j]);
    t.set({0, vj(j)}, inst.c[j]);
  }
  s.set({0, 0}, a);
  s.set({1, 1}, a);
  const Verdict v = check_global({r, s, t}, budget);
  res.nodes = v.nodes;
  switch (v.outcome) {
    case Outcome::inconsistent: res.status = TransportStatus::infeasible; return res;
    case Outcome::undecidable: res.status = TransportStatus::no_solver; return res;
    case Outcome::budget_exceeded: res.status = TransportStatus::budget_exceeded; return res;
    case Outcome::consistent: break;
  }
  const KRelation& w = v.witnesses.back().second;  // over A, B, C, D
  res.d.assign(rows, std::vector<Element>(cols, m.zero()));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) res.d[i][j] = w.at({u(i), 0, 0, vj(j)});
  }
  if (!verify_solution(inst, res.d)) throw consistency_error("P3 witness did not yield a transportation solution");
  res.status = TransportStatus::solved;
  return res;
}

// ---------------------------------------------------------------------------
// counterexamples on cyclic schemas

struct Counterexample {
  Hypergraph schema;
  AcyclicityCertificate cert;
  DomainMap domains;
  Element a;                          ///< uniform annotation d^k · c
  std::vector<KRelation> relations;   ///< one per schema edge
  std::map<int, KRelation> core;      ///< mod-d relations on the core edges
};

/// Vertex names of a core edge after the script ran.
inline std::vector<std::string> core_edge_names(const Hypergraph& h, const AcyclicityCertificate& cert, int e) {
  return h.names(intersect(h.edges[e], cert.w));
}

inline DomainMap mod_domains(const Hypergraph& h, int d) {
  Domain dom;
  for (int i = 0; i < d; ++i) dom.push_back(std::to_string(i));
  DomainMap out;
  for (const auto& v : h.vertices) out[v] = dom;
  return out;
}

/// R_e(t) = a when the sum of t is ≡ 0 (mod d), ≡ 1 for the last core edge.
inline std::map<int, KRelation> mod_relations(const Hypergraph& h, const AcyclicityCertificate& cert,
                                              const DomainMap& doms, const Monoid& m, const Element& a) {
  std::map<int, KRelation> out;
  const int d = cert.d;
  for (std::size_t i = 0; i < cert.core_edges.size(); ++i) {
    const int e = cert.core_edges[i];
    const int residue = i + 1 == cert.core_edges.size() ? 1 : 0;
    KRelation r(m, AttributeSet(core_edge_names(h, cert, e), doms));
    for_each_tuple(r.attrs(), [&](const Tuple& t) {
      int s = 0;
      for (auto x : t) s += static_cast<int>(x);
      if (s % d == residue) r.set(t, a);
      return true;
    });
    out.emplace(e, std::move(r));
  }
  return out;
}

/**
 * Carries relations on the surviving edges back through a safe-deletion
 * script: a covered edge gets the marginal of its cover, a deleted vertex
 * is re-attached with the first domain value and zero elsewhere.
 */
inline std::vector<KRelation> invert_script(const Hypergraph& h, const std::vector<SafeDeletionStep>& steps,
                                            std::map<int, KRelation> rels, const DomainMap& doms) {
  std::vector<ReplayState> states{initial_state(h)};
  for (const auto& st : steps) {
    states.push_back(states.back());
    apply_step(states.back(), st);
  }
  for (std::size_t i = steps.size(); i-- > 0;) {
    const SafeDeletionStep& st = steps[i];
    const ReplayState& before = states[i];
    if (st.kind == SafeDeletionStep::Kind::covered_edge) {
      const KRelation& cover = rels.at(st.cover);
      rels[st.edge] = marginal(cover, h.names(*before.edges[st.edge]));
      continue;
    }
    const std::string& vname = h.vertices[st.vertex];
    for (std::size_t e = 0; e < before.edges.size(); ++e) {
      const auto& x = before.edges[e];
      if (!x || !std::binary_search(x->begin(), x->end(), st.vertex)) continue;
      const KRelation& s = rels.at(static_cast<int>(e));
      KRelation r(s.monoid(), AttributeSet(h.names(*x), doms));
      const auto pos = r.attrs().positions_of(s.attrs());
      const auto vpos = *r.attrs().position(vname);
      for (const auto& [t, val] : s.annotations()) {
        Tuple u(r.attrs().size(), 0);
        for (std::size_t q = 0; q < pos.size(); ++q) u[pos[q]] = t[q];
        u[vpos] = 0;  // default value u_0
        r.set(u, val);
      }
      rels[static_cast<int>(e)] = std::move(r);
    }
  }
  std::vector<KRelation> out;
  for (std::size_t e = 0; e < h.edges.size(); ++e) out.push_back(rels.at(static_cast<int>(e)));
  return out;
}

inline Natural power_of(Natural d, int k) {
  Natural out = 1;
  for (int i = 0; i < k; ++i) out = checked_mul(out, d);
  return out;
}

/// Pairwise consistent, globally inconsistent relations over a cyclic schema.
inline Counterexample generate_counterexample(const Hypergraph& h, const Monoid& m, const Element& c) {
  if (!m.contains(c) || m.is_zero(c)) throw consistency_error("counterexample needs a nonzero element");
  Counterexample out;
  out.schema = h;
  out.cert = check_acyclic(h);
  if (out.cert.acyclic) throw consistency_error("schema is acyclic; no counterexample exists");
  out.domains = mod_domains(h, out.cert.d);
  out.a = m.times(power_of(static_cast<Natural>(out.cert.d), out.cert.k), c);
  out.core = mod_relations(h, out.cert, out.domains, m, out.a);
  out.relations = invert_script(h, out.cert.deletions, out.core, out.domains);
  return out;
}

/**
 * The counting argument behind global inconsistency: every core vertex lies
 * in exactly d core edges, so summing the edge congruences gives
 * d·Σt ≡ 1 (mod d), impossible for d >= 2. Also confirmed by trying all
 * d^|W| assignments.
 */
struct ParityCertificate {
  int k = 0;
  int d = 0;
  bool uniform = false;
  bool regular = false;
  int odd_edges = 0;                 ///< edges with residue 1
  std::uint64_t assignments = 0;     ///< assignments enumerated
  bool no_assignment = false;        ///< none satisfies every congruence
  bool valid() const { return uniform && regular && odd_edges == 1 && d >= 2 && no_assignment; }
};

inline ParityCertificate parity_certificate(const Hypergraph& h, const AcyclicityCertificate& cert) {
  ParityCertificate pc;
  pc.k = cert.k;
  pc.d = cert.d;
  std::vector<VertexSet> edges;
  for (int e : cert.core_edges) edges.push_back(intersect(h.edges[e], cert.w));
  pc.uniform = std::all_of(edges.begin(), edges.end(), [&](const VertexSet& x) { return static_cast<int>(x.size()) == cert.k; });
  pc.regular = true;
  for (int v : cert.w) {
    int deg = 0;
    for (const auto& x : edges) deg += std::binary_search(x.begin(), x.end(), v) ? 1 : 0;
    pc.regular = pc.regular && deg == cert.d;
  }
  pc.odd_edges = edges.empty() ? 0 : 1;
  std::map<int, int> slot;
  for (std::size_t i = 0; i < cert.w.size(); ++i) slot[cert.w[i]] = static_cast<int>(i);
  std::vector<int> t(cert.w.size(), 0);
  pc.no_assignment = true;
  while (true) {
    ++pc.assignments;
    bool all = true;
    for (std::size_t i = 0; i < edges.size() && all; ++i) {
      int s = 0;
      for (int v : edges[i]) s += t[slot[v]];
      all = s % cert.d == (i + 1 == edges.size() ? 1 : 0);
    }
    if (all) {
      pc.no_assignment = false;
      break;
    }
    std::size_t p = 0;
    while (p < t.size() && ++t[p] == cert.d) t[p++] = 0;
    if (p == t.size()) break;
  }
  return pc;
}

}  // namespace kcons
