#pragma once

// Seeded generators and brute-force oracles shared by the unit and acceptance tests.
// The oracles work on attribute *names* and plain enumeration so they do not reuse
// the library's position bookkeeping.

#include <kcons/kcons.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace kcons::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// A random nonzero element; small values so sums stay readable.
inline Element random_nonzero(const Monoid& m, Rng& rng) {
  const auto& caps = m.caps();
  if (caps.finite) {
    const auto elems = m.elements();
    return elems.at(static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(elems.size()) - 1)));
  }
  switch (m.kind()) {
    case Element::Kind::natural:
      return Element(Natural(uniform_int(rng, 1, 4)));
    case Element::Kind::rational:
      if (m.name() == "fuzzy") return Element(Rational(uniform_int(rng, 1, 8), 8));
      return Element(Rational(uniform_int(rng, 1, 7), uniform_int(rng, 1, 4)));
    case Element::Kind::set:
    case Element::Kind::map:
      break;
  }
  throw std::logic_error("no generator for " + m.name());
}

inline DomainMap make_domains(const std::vector<std::string>& attrs, Rng& rng, int max_size) {
  DomainMap d;
  for (const auto& a : attrs) {
    const int n = uniform_int(rng, 1, max_size);
    for (int i = 1; i <= n; ++i) d[a].push_back(a + std::to_string(i));
  }
  return d;
}

/// Random relation with roughly `density` of all tuples in the support, capped at `max_support`.
inline KRelation random_relation(const Monoid& m, const AttributeSet& attrs, Rng& rng, double density,
                                 std::size_t max_support = 1000) {
  KRelation r(m, attrs);
  for_each_tuple(attrs, [&](const Tuple& t) {
    if (r.support_size() < max_support && coin(rng, density)) r.set(t, random_nonzero(m, rng));
    return true;
  });
  return r;
}

/// Marginals of a random joint relation over A,B,C: a consistent pair R(AB), S(BC).
struct Pair {
  KRelation joint, r, s;
};

inline Pair consistent_pair(const Monoid& m, Rng& rng, int max_dom = 3, double density = 0.35,
                            std::size_t max_support = 12) {
  const DomainMap d = make_domains({"A", "B", "C"}, rng, max_dom);
  KRelation joint = random_relation(m, AttributeSet({"A", "B", "C"}, d), rng, density, max_support);
  return {joint, marginal(joint, std::vector<std::string>{"A", "B"}), marginal(joint, std::vector<std::string>{"B", "C"})};
}

// ---------------------------------------------------------------------------
// hypergraphs

inline Hypergraph random_hypergraph(Rng& rng, int max_vertices) {
  const int n = uniform_int(rng, 2, max_vertices);
  std::vector<std::string> vs;
  for (int i = 1; i <= n; ++i) vs.push_back("V" + std::to_string(i));
  const int m = uniform_int(rng, 1, n + 1);
  std::vector<std::vector<std::string>> edges;
  std::set<std::string> used;
  for (int e = 0; e < m; ++e) {
    std::vector<std::string> edge;
    for (const auto& v : vs) {
      if (coin(rng, 0.45)) edge.push_back(v);
    }
    if (edge.empty()) edge.push_back(vs[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))]);
    for (const auto& v : edge) used.insert(v);
    edges.push_back(edge);
  }
  std::vector<std::string> live;
  for (const auto& v : vs) {
    if (used.count(v)) live.push_back(v);
  }
  return Hypergraph(live, edges);
}

/// Acyclic by construction: each new edge shares a subset of one earlier edge plus fresh vertices.
inline std::vector<std::vector<std::string>> random_acyclic_edges(Rng& rng, int edges, int max_fresh) {
  std::vector<std::vector<std::string>> out;
  int next = 1;
  auto fresh = [&] { return "X" + std::to_string(next++); };
  std::vector<std::string> first;
  for (int i = uniform_int(rng, 1, max_fresh); i > 0; --i) first.push_back(fresh());
  out.push_back(first);
  for (int e = 1; e < edges; ++e) {
    const auto& host = out[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(out.size()) - 1))];
    std::vector<std::string> edge;
    for (const auto& v : host) {
      if (coin(rng)) edge.push_back(v);
    }
    for (int i = uniform_int(rng, edge.empty() ? 1 : 0, max_fresh); i > 0; --i) edge.push_back(fresh());
    out.push_back(edge);
  }
  return out;
}

namespace oracle {

using NamedTuple = std::map<std::string, std::string>;

/// Name-keyed view of a relation's support.
inline std::map<NamedTuple, Element> named(const KRelation& r) {
  std::map<NamedTuple, Element> out;
  for (const auto& [t, v] : r.annotations()) {
    NamedTuple nt;
    for (std::size_t i = 0; i < r.attrs().size(); ++i) nt[r.attrs().names()[i]] = r.attrs().domain(i)[t[i]];
    out.emplace(nt, v);
  }
  return out;
}

/// Marginal by summing over named tuples; zeros are dropped.
inline std::map<NamedTuple, Element> marginal(const KRelation& r, const std::set<std::string>& y) {
  std::map<NamedTuple, Element> acc;
  for (const auto& [nt, v] : named(r)) {
    NamedTuple key;
    for (const auto& [a, x] : nt) {
      if (y.count(a)) key[a] = x;
    }
    auto it = acc.find(key);
    acc[key] = it == acc.end() ? v : r.monoid().add(it->second, v);
  }
  for (auto it = acc.begin(); it != acc.end();) {
    it = r.monoid().is_zero(it->second) ? acc.erase(it) : std::next(it);
  }
  return acc;
}

inline std::set<std::string> attr_names(const KRelation& r) {
  return {r.attrs().names().begin(), r.attrs().names().end()};
}

inline bool witnesses(const KRelation& w, const std::vector<KRelation>& parts) {
  std::set<std::string> all;
  for (const auto& p : parts) {
    for (const auto& a : attr_names(p)) all.insert(a);
  }
  if (all != attr_names(w)) return false;
  for (const auto& p : parts) {
    if (marginal(w, attr_names(p)) != named(p)) return false;
  }
  return true;
}

inline std::vector<std::vector<bool>> adjacency(const Hypergraph& h) {
  const auto n = static_cast<std::size_t>(h.size());
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& e : h.edges) {
    for (int a : e) {
      for (int b : e) {
        if (a != b) adj[a][b] = true;
      }
    }
  }
  return adj;
}

/// Brute force: some vertex subset of size >= 4 induces a cycle.
inline bool chordal(const Hypergraph& h) {
  const auto adj = adjacency(h);
  const int n = h.size();
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    std::vector<int> vs;
    for (int v = 0; v < n; ++v) {
      if (mask >> v & 1U) vs.push_back(v);
    }
    if (vs.size() < 4) continue;
    bool all_two = true;
    for (int v : vs) {
      int deg = 0;
      for (int u : vs) deg += adj[v][u] ? 1 : 0;
      all_two = all_two && deg == 2;
    }
    if (!all_two) continue;
    // connected?
    std::set<int> seen{vs[0]};
    std::vector<int> stack{vs[0]};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : vs) {
        if (adj[v][u] && seen.insert(u).second) stack.push_back(u);
      }
    }
    if (seen.size() == vs.size()) return false;
  }
  return true;
}

/// Brute force: every clique of the primal graph lies inside an edge.
inline bool conformal(const Hypergraph& h) {
  const auto adj = adjacency(h);
  const int n = h.size();
  for (unsigned mask = 1; mask < (1U << n); ++mask) {
    std::vector<int> vs;
    for (int v = 0; v < n; ++v) {
      if (mask >> v & 1U) vs.push_back(v);
    }
    bool clique = true;
    for (int a : vs) {
      for (int b : vs) clique = clique && (a == b || adj[a][b]);
    }
    if (!clique || vs.size() < 2) continue;
    bool covered = false;
    for (const auto& e : h.edges) covered = covered || std::includes(e.begin(), e.end(), vs.begin(), vs.end());
    if (!covered) return false;
  }
  return true;
}

/// Graham reduction on name sets: acyclic iff it ends with at most one (empty) edge.
inline bool gyo_acyclic(const Hypergraph& h) {
  std::vector<std::set<int>> edges;
  for (const auto& e : h.edges) edges.emplace_back(e.begin(), e.end());
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<int, int> count;
    for (const auto& e : edges) {
      for (int v : e) ++count[v];
    }
    for (auto& e : edges) {
      for (auto it = e.begin(); it != e.end();) {
        if (count[*it] == 1) {
          it = e.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    for (std::size_t i = 0; i < edges.size() && !changed; ++i) {
      for (std::size_t j = 0; j < edges.size(); ++j) {
        if (i != j && std::includes(edges[j].begin(), edges[j].end(), edges[i].begin(), edges[i].end())) {
          edges.erase(edges.begin() + static_cast<long>(i));
          changed = true;
          break;
        }
      }
    }
  }
  return edges.size() <= 1;
}

/// Brute force over all matrices of a finite monoid.
inline bool transport_feasible(const Monoid& m, const std::vector<Element>& b, const std::vector<Element>& c) {
  const auto elems = m.elements();
  const std::size_t rows = b.size(), cols = c.size(), cells = rows * cols;
  std::vector<std::size_t> idx(cells, 0);
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < rows && ok; ++i) {
      Element s = m.zero();
      for (std::size_t j = 0; j < cols; ++j) s = m.add(s, elems[idx[i * cols + j]]);
      ok = s == b[i];
    }
    for (std::size_t j = 0; j < cols && ok; ++j) {
      Element s = m.zero();
      for (std::size_t i = 0; i < rows; ++i) s = m.add(s, elems[idx[i * cols + j]]);
      ok = s == c[j];
    }
    if (ok) return true;
    std::size_t p = 0;
    while (p < cells && ++idx[p] == elems.size()) idx[p++] = 0;
    if (p == cells) return false;
  }
}

}  // namespace oracle

}  // namespace kcons::testing
