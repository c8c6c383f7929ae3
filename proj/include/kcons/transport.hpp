#pragma once

/**
 * @file transport.hpp
 * @brief Balanced transportation instances over a monoid and their solvers.
 *
 * Find D with row sums b and column sums c. Solvers: northwest corner
 * (weakly cancellative, totally preordered), lattice meet (d_ij = b_i × c_j),
 * Vorob'ev (semifields, d_ij = b_i c_j / total), component-wise (powers) and
 * exhaustive backtracking (finite monoids).
 */

#include "catalog.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kcons {

class transport_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Matrix = std::vector<std::vector<Element>>;

struct TransportInstance {
  Monoid monoid;
  std::vector<Element> b;  ///< row sums
  std::vector<Element> c;  ///< column sums
};

enum class TransportStatus { solved, infeasible, unbalanced, budget_exceeded, no_solver };

inline const char* to_string(TransportStatus s) {
  switch (s) {
    case TransportStatus::solved: return "solved";
    case TransportStatus::infeasible: return "infeasible";
    case TransportStatus::unbalanced: return "unbalanced";
    case TransportStatus::budget_exceeded: return "budget-exceeded";
    case TransportStatus::no_solver: return "no-solver";
  }
  return "";
}

struct TransportResult {
  TransportStatus status = TransportStatus::no_solver;
  Matrix d;
  std::string method;
  std::uint64_t nodes = 0;  ///< backtracking nodes (exhaustive only)
};

inline constexpr std::uint64_t default_budget = 10'000'000;

inline bool is_balanced(const TransportInstance& inst) {
  return inst.monoid.sum(inst.b) == inst.monoid.sum(inst.c);
}

inline bool verify_solution(const TransportInstance& inst, const Matrix& d) {
  const Monoid& m = inst.monoid;
  if (d.size() != inst.b.size()) return false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i].size() != inst.c.size()) return false;
    if (m.sum(d[i]) != inst.b[i]) return false;
  }
  for (std::size_t j = 0; j < inst.c.size(); ++j) {
    Element s = m.zero();
    for (std::size_t i = 0; i < d.size(); ++i) s = m.add(s, d[i][j]);
    if (s != inst.c[j]) return false;
  }
  return true;
}

namespace detail {

inline void check_shape(const TransportInstance& inst) {
  if (inst.b.empty() || inst.c.empty()) throw transport_error("transport instance needs m >= 1 and n >= 1");
  if (!is_balanced(inst)) throw transport_error("unbalanced transport instance");
}

inline Matrix zero_matrix(const TransportInstance& inst) {
  return Matrix(inst.b.size(), std::vector<Element>(inst.c.size(), inst.monoid.zero()));
}

}  // namespace detail

/**
 * Northwest corner recursion. Zero margins are eliminated first; then on
 * each step the equality branch is preferred, then b1 ⊑ c1, then c1 ⊑ b1.
 */
inline Matrix solve_northwest(const TransportInstance& inst) {
  const Monoid& m = inst.monoid;
  if (!m.northwest_capable()) {
    throw capability_error(m.name() + " is not weakly cancellative and totally preordered");
  }
  detail::check_shape(inst);
  Matrix d = detail::zero_matrix(inst);
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < inst.b.size(); ++i) {
    if (!m.is_zero(inst.b[i])) rows.push_back(i);
  }
  for (std::size_t j = 0; j < inst.c.size(); ++j) {
    if (!m.is_zero(inst.c[j])) cols.push_back(j);
  }
  std::vector<Element> rb = inst.b, rc = inst.c;
  std::size_t r = 0, k = 0;
  while (r < rows.size() && k < cols.size()) {
    const std::size_t i = rows[r], j = cols[k];
    if (r + 1 == rows.size()) {
      // one row left: x_1j = c_j
      for (std::size_t q = k; q < cols.size(); ++q) d[i][cols[q]] = rc[cols[q]];
      break;
    }
    if (k + 1 == cols.size()) {
      // one column left: x_i1 = b_i
      for (std::size_t q = r; q < rows.size(); ++q) d[rows[q]][j] = rb[rows[q]];
      break;
    }
    if (rb[i] == rc[j]) {
      d[i][j] = rb[i];
      ++r;
      ++k;
    } else if (auto a = m.try_subtract(rb[i], rc[j])) {
      d[i][j] = rb[i];
      rc[j] = *a;
      ++r;
    } else if (auto a2 = m.try_subtract(rc[j], rb[i])) {
      d[i][j] = rc[j];
      rb[i] = *a2;
      ++k;
    } else {
      throw capability_error(m.name() + ": incomparable margins " + to_string(rb[i]) + " and " + to_string(rc[j]));
    }
  }
  if (!verify_solution(inst, d)) throw transport_error("northwest corner produced an invalid matrix on " + m.name());
  return d;
}

/// Lattice semirings: d_ij = b_i × c_j.
inline Matrix solve_meet(const TransportInstance& inst) {
  const Monoid& m = inst.monoid;
  if (!m.caps().lattice) throw capability_error(m.name() + " is not an absorptive, idempotent semiring");
  detail::check_shape(inst);
  Matrix d = detail::zero_matrix(inst);
  for (std::size_t i = 0; i < inst.b.size(); ++i) {
    for (std::size_t j = 0; j < inst.c.size(); ++j) d[i][j] = m.multiply(inst.b[i], inst.c[j]);
  }
  if (!verify_solution(inst, d)) throw transport_error("meet solution failed to verify on " + m.name());
  return d;
}

/// Semifields: d_ij = b_i c_j / total.
inline Matrix solve_vorobev(const TransportInstance& inst) {
  const Monoid& m = inst.monoid;
  if (!m.caps().semifield) throw capability_error(m.name() + " is not a semifield");
  detail::check_shape(inst);
  Matrix d = detail::zero_matrix(inst);
  const Element t = m.sum(inst.b);
  if (m.is_zero(t)) return d;
  for (std::size_t i = 0; i < inst.b.size(); ++i) {
    for (std::size_t j = 0; j < inst.c.size(); ++j) d[i][j] = m.divide(m.multiply(inst.b[i], inst.c[j]), t);
  }
  if (!verify_solution(inst, d)) throw transport_error("semifield solution failed to verify on " + m.name());
  return d;
}

/**
 * Backtracking over cells in row-major order with candidates in
 * enumeration order (zero first). A partial row or column sum p must stay
 * below its target (p ⊑ target) and hit it exactly at the last cell.
 */
inline TransportResult solve_exhaustive(const TransportInstance& inst, std::uint64_t budget = default_budget) {
  const Monoid& m = inst.monoid;
  if (!m.caps().finite) throw capability_error(m.name() + " is not finite");
  if (inst.b.empty() || inst.c.empty()) throw transport_error("transport instance needs m >= 1 and n >= 1");
  TransportResult res;
  res.method = "exhaustive";
  if (!is_balanced(inst)) {
    res.status = TransportStatus::unbalanced;
    return res;
  }
  const FiniteTable tab(m);
  const std::size_t rows = inst.b.size(), cols = inst.c.size();
  std::vector<int> bt, ct;
  for (const auto& x : inst.b) bt.push_back(tab.of(x));
  for (const auto& x : inst.c) ct.push_back(tab.of(x));
  std::vector<int> rp(rows, 0), cp(cols, 0);
  std::vector<int> cell(rows * cols, -1);
  std::uint64_t nodes = 0;
  std::size_t pos = 0;
  std::vector<std::pair<int, int>> saved(rows * cols);
  bool found = false;
  while (true) {
    if (pos == rows * cols) {
      found = true;
      break;
    }
    const std::size_t i = pos / cols, j = pos % cols;
    if (cell[pos] >= 0) {
      rp[i] = saved[pos].first;
      cp[j] = saved[pos].second;
    }
    bool placed = false;
    for (int v = cell[pos] + 1; v < tab.size(); ++v) {
      if (++nodes > budget) {
        res.status = TransportStatus::budget_exceeded;
        res.nodes = nodes;
        return res;
      }
      const int nr = tab.sum[rp[i]][v];
      const int nc = tab.sum[cp[j]][v];
      const bool row_ok = (j + 1 == cols) ? nr == bt[i] : tab.leq[nr][bt[i]] != 0;
      const bool col_ok = (i + 1 == rows) ? nc == ct[j] : tab.leq[nc][ct[j]] != 0;
      if (row_ok && col_ok) {
        saved[pos] = {rp[i], cp[j]};
        cell[pos] = v;
        rp[i] = nr;
        cp[j] = nc;
        placed = true;
        break;
      }
    }
    if (placed) {
      ++pos;
      continue;
    }
    cell[pos] = -1;
    if (pos == 0) break;
    --pos;
  }
  res.nodes = nodes;
  if (!found) {
    res.status = TransportStatus::infeasible;
    return res;
  }
  res.status = TransportStatus::solved;
  res.d.assign(rows, std::vector<Element>(cols));
  for (std::size_t p = 0; p < rows * cols; ++p) res.d[p / cols][p % cols] = tab.elems[cell[p]];
  return res;
}

inline TransportResult solve_best(const TransportInstance& inst, std::uint64_t budget = default_budget);

/// Solves each index component over the base monoid and reassembles.
inline Matrix solve_componentwise(const TransportInstance& inst, std::uint64_t budget = default_budget) {
  const Monoid& m = inst.monoid;
  const Monoid* base = m.power_base();
  if (!m.caps().power || base == nullptr) throw capability_error(m.name() + " is not a finite-support power");
  detail::check_shape(inst);
  std::set<std::string> keys;
  for (const auto* v : {&inst.b, &inst.c}) {
    for (const auto& e : *v) {
      for (const auto& [k, x] : e.as_map()) keys.insert(k);
    }
  }
  const auto& impl_key = [&](const Element& e, const std::string& k) {
    const Element* x = e.find(k);
    return x ? *x : base->zero();
  };
  std::vector<std::vector<ElementMap>> parts(inst.b.size(), std::vector<ElementMap>(inst.c.size()));
  for (const auto& k : keys) {
    TransportInstance sub{*base, {}, {}};
    for (const auto& e : inst.b) sub.b.push_back(impl_key(e, k));
    for (const auto& e : inst.c) sub.c.push_back(impl_key(e, k));
    const TransportResult r = solve_best(sub, budget);
    if (r.status != TransportStatus::solved) {
      throw transport_error("component '" + k + "' is " + to_string(r.status) + " over " + base->name());
    }
    for (std::size_t i = 0; i < inst.b.size(); ++i) {
      for (std::size_t j = 0; j < inst.c.size(); ++j) {
        if (!base->is_zero(r.d[i][j])) parts[i][j].emplace_back(k, r.d[i][j]);
      }
    }
  }
  Matrix d(inst.b.size(), std::vector<Element>(inst.c.size()));
  for (std::size_t i = 0; i < inst.b.size(); ++i) {
    for (std::size_t j = 0; j < inst.c.size(); ++j) d[i][j] = Element(std::move(parts[i][j]));
  }
  if (!verify_solution(inst, d)) throw transport_error("component-wise solution failed to verify on " + m.name());
  return d;
}

/// Name of the solver solve_best would use, or "" when none applies.
inline std::string transport_method(const Monoid& m) {
  const auto& c = m.caps();
  if (c.lattice) return "meet";
  if (m.northwest_capable()) return "northwest";
  if (c.semifield) return "vorobev";
  if (c.power && m.power_base() != nullptr && !transport_method(*m.power_base()).empty()) return "componentwise";
  if (c.finite) return "exhaustive";
  return "";
}

inline TransportResult solve_best(const TransportInstance& inst, std::uint64_t budget) {
  TransportResult res;
  res.method = transport_method(inst.monoid);
  if (inst.b.empty() || inst.c.empty()) throw transport_error("transport instance needs m >= 1 and n >= 1");
  if (res.method.empty()) return res;
  if (!is_balanced(inst)) {
    res.status = TransportStatus::unbalanced;
    return res;
  }
  if (res.method == "exhaustive") return solve_exhaustive(inst, budget);
  if (res.method == "meet") res.d = solve_meet(inst);
  if (res.method == "northwest") res.d = solve_northwest(inst);
  if (res.method == "vorobev") res.d = solve_vorobev(inst);
  if (res.method == "componentwise") res.d = solve_componentwise(inst, budget);
  res.status = TransportStatus::solved;
  return res;
}

}  // namespace kcons
