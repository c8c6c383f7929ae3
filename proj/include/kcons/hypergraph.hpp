#pragma once

/**
 * @file hypergraph.hpp
 * @brief Hypergraphs, GYO reduction, join trees, chordality/conformality and
 * extraction of minimal cyclic cores C_n / H_n.
 *
 * Vertices are identified by their position in the vertex list and edges by
 * their position in the edge list; every tie is broken toward the lowest
 * index.
 */

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace kcons {

class hypergraph_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using VertexSet = std::vector<int>;  ///< sorted vertex indices

struct Hypergraph {
  std::vector<std::string> vertices;
  std::vector<VertexSet> edges;

  Hypergraph() = default;

  /// Validating constructor from names; edges must be non-empty subsets of vertices.
  Hypergraph(std::vector<std::string> vs, const std::vector<std::vector<std::string>>& es) : vertices(std::move(vs)) {
    std::set<std::string> seen;
    for (const auto& v : vertices) {
      if (!seen.insert(v).second) throw hypergraph_error("duplicate vertex '" + v + "'");
    }
    for (const auto& e : es) {
      if (e.empty()) throw hypergraph_error("hyperedges must be non-empty");
      VertexSet s;
      for (const auto& v : e) s.push_back(index_of(v));
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      edges.push_back(std::move(s));
    }
  }

  int index_of(const std::string& v) const {
    auto it = std::find(vertices.begin(), vertices.end(), v);
    if (it == vertices.end()) throw hypergraph_error("unknown vertex '" + v + "'");
    return static_cast<int>(it - vertices.begin());
  }

  std::vector<std::string> names(const VertexSet& s) const {
    std::vector<std::string> out;
    for (int v : s) out.push_back(vertices[v]);
    return out;
  }

  std::string label(const VertexSet& s) const {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + vertices[s[i]];
    return out + "}";
  }

  int size() const { return static_cast<int>(vertices.size()); }
};

inline bool subset_of(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline VertexSet intersect(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline VertexSet unite(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// P_n, C_n or H_n on vertices A1..An.
inline Hypergraph make_named(char kind, int n) {
  std::vector<std::string> vs;
  for (int i = 1; i <= n; ++i) vs.push_back("A" + std::to_string(i));
  std::vector<std::vector<std::string>> es;
  switch (kind) {
    case 'P':
      if (n < 2) throw hypergraph_error("P_n needs n >= 2");
      for (int i = 0; i + 1 < n; ++i) es.push_back({vs[i], vs[i + 1]});
      break;
    case 'C':
      if (n < 3) throw hypergraph_error("C_n needs n >= 3");
      for (int i = 0; i < n; ++i) es.push_back({vs[i], vs[(i + 1) % n]});
      break;
    case 'H':
      if (n < 3) throw hypergraph_error("H_n needs n >= 3");
      for (int i = 0; i < n; ++i) {
        std::vector<std::string> e;
        for (int j = 0; j < n; ++j) {
          if (j != i) e.push_back(vs[j]);
        }
        es.push_back(e);
      }
      break;
    default:
      throw hypergraph_error(std::string("unknown hypergraph family '") + kind + "'");
  }
  return Hypergraph(vs, es);
}

/// R(H): drops every edge included in another edge (the first of equal edges survives).
inline Hypergraph reduce(const Hypergraph& h) {
  Hypergraph out;
  out.vertices = h.vertices;
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    bool covered = false;
    for (std::size_t j = 0; j < h.edges.size() && !covered; ++j) {
      if (i == j || !subset_of(h.edges[i], h.edges[j])) continue;
      covered = h.edges[i] != h.edges[j] || j < i;
    }
    if (!covered) out.edges.push_back(h.edges[i]);
  }
  return out;
}

/// H[W] = (W, {X ∩ W : X ∈ E} \ {∅}); vertex indices are renumbered to W's order.
inline Hypergraph induced(const Hypergraph& h, const VertexSet& w) {
  if (w.empty()) throw hypergraph_error("induced subhypergraph needs a non-empty vertex set");
  VertexSet sw = w;
  std::sort(sw.begin(), sw.end());
  sw.erase(std::unique(sw.begin(), sw.end()), sw.end());
  std::map<int, int> renum;
  Hypergraph out;
  for (int v : sw) {
    if (v < 0 || v >= h.size()) throw hypergraph_error("vertex index out of range");
    renum[v] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(h.vertices[v]);
  }
  std::set<VertexSet> seen;
  for (const auto& e : h.edges) {
    VertexSet x;
    for (int v : e) {
      if (renum.count(v)) x.push_back(renum[v]);
    }
    if (!x.empty() && seen.insert(x).second) out.edges.push_back(x);
  }
  return out;
}

/// Adjacency matrix of the primal (Gaifman) graph.
inline std::vector<std::vector<char>> primal_graph(const Hypergraph& h) {
  std::vector<std::vector<char>> adj(h.size(), std::vector<char>(h.size(), 0));
  for (const auto& e : h.edges) {
    for (int a : e) {
      for (int b : e) {
        if (a != b) adj[a][b] = 1;
      }
    }
  }
  return adj;
}

/**
 * A chordless cycle of length >= 4, or empty when the graph is chordal.
 * For each vertex v and each non-adjacent pair a < b of its neighbours, a
 * shortest a-b path avoiding the other neighbours of v closes such a cycle.
 */
inline std::vector<int> chordless_cycle(const std::vector<std::vector<char>>& adj) {
  const int n = static_cast<int>(adj.size());
  for (int v = 0; v < n; ++v) {
    std::vector<int> nb;
    for (int u = 0; u < n; ++u) {
      if (adj[v][u]) nb.push_back(u);
    }
    for (std::size_t x = 0; x < nb.size(); ++x) {
      for (std::size_t y = x + 1; y < nb.size(); ++y) {
        const int a = nb[x], b = nb[y];
        if (adj[a][b]) continue;
        std::vector<char> blocked(n, 0);
        blocked[v] = 1;
        for (int u : nb) blocked[u] = 1;
        blocked[a] = blocked[b] = 0;
        std::vector<int> prev(n, -2);
        std::deque<int> q{a};
        prev[a] = -1;
        while (!q.empty() && prev[b] == -2) {
          const int cur = q.front();
          q.pop_front();
          for (int u = 0; u < n; ++u) {
            if (adj[cur][u] && !blocked[u] && prev[u] == -2) {
              prev[u] = cur;
              q.push_back(u);
            }
          }
        }
        if (prev[b] == -2) continue;
        std::vector<int> path;
        for (int u = b; u != -1; u = prev[u]) path.push_back(u);
        std::reverse(path.begin(), path.end());
        std::vector<int> cycle{v};
        cycle.insert(cycle.end(), path.begin(), path.end());
        return cycle;
      }
    }
  }
  return {};
}

/// Gilmore: conformal iff for every three edges the union of their pairwise intersections lies in an edge.
inline std::optional<VertexSet> uncovered_clique(const Hypergraph& h) {
  const auto& e = h.edges;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      for (std::size_t k = j + 1; k < e.size(); ++k) {
        const VertexSet u = unite(unite(intersect(e[i], e[j]), intersect(e[j], e[k])), intersect(e[i], e[k]));
        const bool covered = std::any_of(e.begin(), e.end(), [&](const VertexSet& f) { return subset_of(u, f); });
        if (!covered) return u;
      }
    }
  }
  return std::nullopt;
}

struct PrimalReport {
  bool chordal = true;
  bool conformal = true;
  std::vector<int> cycle;   ///< chordless cycle when not chordal
  VertexSet clique;         ///< uncovered clique when not conformal
};

inline PrimalReport primal_chordal_conformal(const Hypergraph& h) {
  PrimalReport r;
  r.cycle = chordless_cycle(primal_graph(h));
  r.chordal = r.cycle.empty();
  if (auto c = uncovered_clique(h)) {
    r.conformal = false;
    r.clique = *c;
  }
  return r;
}

struct SafeDeletionStep {
  enum class Kind { vertex, covered_edge };
  Kind kind = Kind::vertex;
  int vertex = -1;  ///< vertex deletion
  int edge = -1;    ///< covered-edge deletion: deleted edge
  int cover = -1;   ///< covered-edge deletion: covering edge

  static SafeDeletionStep delete_vertex(int v) { return {Kind::vertex, v, -1, -1}; }
  static SafeDeletionStep delete_edge(int e, int f) { return {Kind::covered_edge, -1, e, f}; }
};

/// Edge contents by index while replaying a script; nullopt marks deleted edges.
struct ReplayState {
  std::vector<char> alive_vertex;
  std::vector<std::optional<VertexSet>> edges;
};

inline ReplayState initial_state(const Hypergraph& h) {
  ReplayState s;
  s.alive_vertex.assign(h.size(), 1);
  for (const auto& e : h.edges) s.edges.emplace_back(e);
  return s;
}

/// Applies one step, throwing if it is not a safe deletion.
inline void apply_step(ReplayState& s, const SafeDeletionStep& step) {
  if (step.kind == SafeDeletionStep::Kind::vertex) {
    if (step.vertex < 0 || step.vertex >= static_cast<int>(s.alive_vertex.size()) || !s.alive_vertex[step.vertex]) {
      throw hypergraph_error("vertex deletion of a missing vertex");
    }
    s.alive_vertex[step.vertex] = 0;
    for (auto& e : s.edges) {
      if (e) e->erase(std::remove(e->begin(), e->end(), step.vertex), e->end());
    }
    return;
  }
  const int n = static_cast<int>(s.edges.size());
  if (step.edge < 0 || step.edge >= n || step.cover < 0 || step.cover >= n || step.edge == step.cover ||
      !s.edges[step.edge] || !s.edges[step.cover]) {
    throw hypergraph_error("covered-edge deletion refers to a missing edge");
  }
  if (!subset_of(*s.edges[step.edge], *s.edges[step.cover])) {
    throw hypergraph_error("covered-edge deletion of an edge that is not covered");
  }
  s.edges[step.edge].reset();
}

inline ReplayState replay(const Hypergraph& h, const std::vector<SafeDeletionStep>& steps) {
  ReplayState s = initial_state(h);
  for (const auto& st : steps) apply_step(s, st);
  return s;
}

/// The hypergraph left by a replay, on the surviving vertices (original names).
inline Hypergraph state_hypergraph(const Hypergraph& h, const ReplayState& s) {
  Hypergraph out;
  std::map<int, int> renum;
  for (int v = 0; v < h.size(); ++v) {
    if (s.alive_vertex[v]) {
      renum[v] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(h.vertices[v]);
    }
  }
  for (const auto& e : s.edges) {
    if (!e) continue;
    VertexSet x;
    for (int v : *e) x.push_back(renum.at(v));
    out.edges.push_back(x);
  }
  return out;
}

/// Same vertex names and same set of edges (as name sets).
inline bool same_hypergraph(const Hypergraph& a, const Hypergraph& b) {
  if (std::set<std::string>(a.vertices.begin(), a.vertices.end()) !=
      std::set<std::string>(b.vertices.begin(), b.vertices.end())) {
    return false;
  }
  auto edge_names = [](const Hypergraph& h) {
    std::multiset<std::set<std::string>> out;
    for (const auto& e : h.edges) {
      auto ns = h.names(e);
      out.insert(std::set<std::string>(ns.begin(), ns.end()));
    }
    return out;
  };
  return edge_names(a) == edge_names(b);
}

/// Vertex order around the cycle if h ≅ C_n (n >= 3), starting at vertex 0.
inline std::optional<std::vector<int>> as_cycle(const Hypergraph& h) {
  const int n = h.size();
  if (n < 3 || static_cast<int>(h.edges.size()) != n) return std::nullopt;
  std::vector<std::vector<int>> nb(n);
  for (const auto& e : h.edges) {
    if (e.size() != 2) return std::nullopt;
    nb[e[0]].push_back(e[1]);
    nb[e[1]].push_back(e[0]);
  }
  for (const auto& x : nb) {
    if (x.size() != 2 || x[0] == x[1]) return std::nullopt;
  }
  std::vector<int> order{0};
  int prev = -1, cur = 0;
  for (int step = 1; step < n; ++step) {
    const int next = nb[cur][0] != prev ? nb[cur][0] : nb[cur][1];
    if (next == 0) return std::nullopt;
    order.push_back(next);
    prev = cur;
    cur = next;
  }
  if (std::find(nb[cur].begin(), nb[cur].end(), 0) == nb[cur].end()) return std::nullopt;
  return order;
}

/// h ≅ H_n: n edges of size n-1, each missing a different vertex.
inline bool is_h_family(const Hypergraph& h) {
  const int n = h.size();
  if (n < 3 || static_cast<int>(h.edges.size()) != n) return false;
  std::set<int> missing;
  for (const auto& e : h.edges) {
    if (static_cast<int>(e.size()) != n - 1) return false;
    for (int v = 0; v < n; ++v) {
      if (!std::binary_search(e.begin(), e.end(), v)) missing.insert(v);
    }
  }
  return static_cast<int>(missing.size()) == n;
}

struct AcyclicityCertificate {
  bool acyclic = false;

  // acyclic side
  std::vector<int> order;              ///< running-intersection listing of edge indices
  std::vector<int> parent;             ///< join tree parent per edge, -1 at the root
  std::vector<SafeDeletionStep> gyo;   ///< GYO deletions that empty the hypergraph

  // cyclic side
  char core = 0;                       ///< 'C' or 'H'
  VertexSet w;                         ///< vertex set of the core
  std::vector<SafeDeletionStep> deletions;  ///< transforms H to R(H[W])
  std::vector<int> core_edges;         ///< surviving edge indices, ascending
  int k = 0;                           ///< core uniformity
  int d = 0;                           ///< core regularity
};

namespace detail {

/// GYO: vertex in at most one live edge first, then lowest covered edge.
inline std::vector<SafeDeletionStep> gyo(const Hypergraph& h, std::vector<int>& parent, bool& emptied) {
  ReplayState s = initial_state(h);
  parent.assign(h.edges.size(), -1);
  std::vector<SafeDeletionStep> steps;
  while (true) {
    bool progressed = false;
    for (int v = 0; v < h.size() && !progressed; ++v) {
      if (!s.alive_vertex[v]) continue;
      int count = 0;
      for (const auto& e : s.edges) {
        if (e && std::binary_search(e->begin(), e->end(), v)) ++count;
      }
      if (count <= 1) {
        steps.push_back(SafeDeletionStep::delete_vertex(v));
        apply_step(s, steps.back());
        for (auto& e : s.edges) {
          if (e && e->empty()) e.reset();
        }
        progressed = true;
      }
    }
    if (progressed) continue;
    for (std::size_t i = 0; i < s.edges.size() && !progressed; ++i) {
      if (!s.edges[i]) continue;
      for (std::size_t j = 0; j < s.edges.size(); ++j) {
        if (i != j && s.edges[j] && subset_of(*s.edges[i], *s.edges[j])) {
          steps.push_back(SafeDeletionStep::delete_edge(static_cast<int>(i), static_cast<int>(j)));
          parent[i] = static_cast<int>(j);
          s.edges[i].reset();
          progressed = true;
          break;
        }
      }
    }
    if (!progressed) break;
  }
  emptied = std::none_of(s.edges.begin(), s.edges.end(), [](const auto& e) { return e.has_value(); });
  return steps;
}

/// Minimizes w (lowest vertex first) while pred(induced(h, w)) holds.
template <class Pred>
VertexSet shrink(const Hypergraph& h, VertexSet w, Pred pred) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      VertexSet smaller = w;
      smaller.erase(smaller.begin() + static_cast<long>(i));
      if (!smaller.empty() && pred(induced(h, smaller))) {
        w = std::move(smaller);
        changed = true;
        break;
      }
    }
  }
  return w;
}

}  // namespace detail

/// Script: delete V \ W (lowest first), then covered edges (lowest edge, lowest cover).
inline std::vector<SafeDeletionStep> core_script(const Hypergraph& h, const VertexSet& w) {
  std::vector<SafeDeletionStep> steps;
  ReplayState s = initial_state(h);
  for (int v = 0; v < h.size(); ++v) {
    if (!std::binary_search(w.begin(), w.end(), v)) {
      steps.push_back(SafeDeletionStep::delete_vertex(v));
      apply_step(s, steps.back());
    }
  }
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (std::size_t i = 0; i < s.edges.size() && !progressed; ++i) {
      if (!s.edges[i]) continue;
      for (std::size_t j = 0; j < s.edges.size(); ++j) {
        if (i != j && s.edges[j] && subset_of(*s.edges[i], *s.edges[j])) {
          steps.push_back(SafeDeletionStep::delete_edge(static_cast<int>(i), static_cast<int>(j)));
          apply_step(s, steps.back());
          progressed = true;
          break;
        }
      }
    }
  }
  return steps;
}

inline AcyclicityCertificate check_acyclic(const Hypergraph& h) {
  AcyclicityCertificate cert;
  bool emptied = false;
  std::vector<int> gyo_parent;
  cert.gyo = detail::gyo(h, gyo_parent, emptied);
  cert.acyclic = emptied;
  const int m = static_cast<int>(h.edges.size());
  if (cert.acyclic) {
    // GYO trees are vertex-disjoint; join every root to edge 0's tree, then re-root at edge 0.
    std::vector<std::vector<int>> adj(m);
    auto root_of = [&](int e) {
      while (gyo_parent[e] != -1) e = gyo_parent[e];
      return e;
    };
    for (int e = 0; e < m; ++e) {
      if (gyo_parent[e] != -1) {
        adj[e].push_back(gyo_parent[e]);
        adj[gyo_parent[e]].push_back(e);
      }
    }
    if (m > 0) {
      const int main_root = root_of(0);
      for (int e = 0; e < m; ++e) {
        if (gyo_parent[e] == -1 && e != main_root) {
          adj[e].push_back(main_root);
          adj[main_root].push_back(e);
        }
      }
      for (auto& a : adj) std::sort(a.begin(), a.end());
      cert.parent.assign(m, -1);
      std::vector<char> seen(m, 0);
      std::vector<int> stack{0};
      seen[0] = 1;
      while (!stack.empty()) {
        const int e = stack.back();
        stack.pop_back();
        cert.order.push_back(e);
        for (auto it = adj[e].rbegin(); it != adj[e].rend(); ++it) {
          if (!seen[*it]) {
            seen[*it] = 1;
            cert.parent[*it] = e;
            stack.push_back(*it);
          }
        }
      }
    }
    return cert;
  }

  VertexSet all(h.size());
  for (int v = 0; v < h.size(); ++v) all[v] = v;
  if (!chordless_cycle(primal_graph(h)).empty()) {
    cert.core = 'C';
    cert.w = detail::shrink(h, all, [](const Hypergraph& g) { return !chordless_cycle(primal_graph(g)).empty(); });
  } else {
    cert.core = 'H';
    cert.w = detail::shrink(h, all, [](const Hypergraph& g) { return uncovered_clique(g).has_value(); });
  }
  cert.deletions = core_script(h, cert.w);
  const ReplayState s = replay(h, cert.deletions);
  for (int e = 0; e < m; ++e) {
    if (s.edges[e]) cert.core_edges.push_back(e);
  }
  const int n = static_cast<int>(cert.w.size());
  if (cert.core == 'C') {
    cert.k = 2;
    cert.d = 2;
  } else {
    cert.k = n - 1;
    cert.d = n - 1;
  }
  return cert;
}

/// X_i ∩ (X_1 ∪ ... ∪ X_{i-1}) ⊆ X_j for some earlier j, along the listing.
inline bool has_running_intersection(const Hypergraph& h, const std::vector<int>& order) {
  VertexSet seen;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const VertexSet& x = h.edges[order[i]];
    if (i > 0) {
      const VertexSet common = intersect(x, seen);
      bool ok = false;
      for (std::size_t j = 0; j < i && !ok; ++j) ok = subset_of(common, h.edges[order[j]]);
      if (!ok) return false;
    }
    seen = unite(seen, x);
  }
  return true;
}

/// For every vertex the edges containing it induce a connected subtree.
inline bool is_join_tree(const Hypergraph& h, const std::vector<int>& parent) {
  const int m = static_cast<int>(h.edges.size());
  if (static_cast<int>(parent.size()) != m) return false;
  int roots = 0;
  for (int e = 0; e < m; ++e) {
    if (parent[e] == -1) ++roots;
  }
  if (m > 0 && roots != 1) return false;
  for (int v = 0; v < h.size(); ++v) {
    // connected iff exactly one edge containing v has a parent not containing v
    int tops = 0;
    for (int e = 0; e < m; ++e) {
      if (!std::binary_search(h.edges[e].begin(), h.edges[e].end(), v)) continue;
      const int p = parent[e];
      if (p == -1 || !std::binary_search(h.edges[p].begin(), h.edges[p].end(), v)) ++tops;
    }
    if (tops > 1) return false;
  }
  return true;
}

/// Replays the cyclic certificate's script and checks it yields R(H[W]) ≅ C_n or H_n.
inline bool verify_core(const Hypergraph& h, const AcyclicityCertificate& cert) {
  if (cert.acyclic || cert.w.empty()) return false;
  Hypergraph got;
  try {
    got = state_hypergraph(h, replay(h, cert.deletions));
  } catch (const hypergraph_error&) {
    return false;
  }
  const Hypergraph want = reduce(induced(h, cert.w));
  if (!same_hypergraph(got, want)) return false;
  if (cert.core == 'C') return as_cycle(want).has_value();
  if (cert.core == 'H') return is_h_family(want);
  return false;
}

}  // namespace kcons
