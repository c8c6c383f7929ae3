#pragma once

/**
 * @file covers.hpp
 * @brief Covers h : K* ->> K, lifts of relations, the free cover and the
 * local-to-global pipeline up to the free cover.
 */

#include "consistency.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kcons {

class cover_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Cover {
  enum class Kind { identity, free, truncation, custom };

  Kind kind = Kind::identity;
  Monoid upstairs;
  Monoid downstairs;
  std::function<Element(const Element&)> map;                        ///< h
  std::function<std::optional<Element>(const Element&)> preimage;    ///< some x with h(x) = a

  Element operator()(const Element& x) const { return map(x); }

  std::string name() const {
    switch (kind) {
      case Kind::identity: return "identity";
      case Kind::free: return "free";
      case Kind::truncation: return "truncation";
      case Kind::custom: return "custom";
    }
    return "";
  }
};

inline Cover identity_cover(const Monoid& k) {
  Cover cv;
  cv.kind = Cover::Kind::identity;
  cv.upstairs = cv.downstairs = k;
  cv.map = [](const Element& x) { return x; };
  cv.preimage = [](const Element& a) { return std::optional<Element>(a); };
  return cv;
}

/// Generator name of a nonzero element: its canonical rendering.
inline std::string generator_name(const Element& a) { return to_string(a); }

/**
 * F(K⁺) ->> K with generators named by canonical renderings; a linear form
 * Σ c_x x evaluates to Σ c_x·g(x). Generators are open, so any element that
 * shows up gets a generator.
 */
inline Cover free_cover(const Monoid& k) {
  Cover cv;
  cv.kind = Cover::Kind::free;
  cv.downstairs = k;
  cv.upstairs = make_builtin("free");
  cv.map = [k](const Element& f) {
    Element acc = k.zero();
    for (const auto& [gen, coeff] : f.as_map()) acc = k.add(acc, k.times(coeff.as_natural(), element_from_name(k, gen)));
    return acc;
  };
  cv.preimage = [k](const Element& a) -> std::optional<Element> {
    if (k.is_zero(a)) return Element(ElementMap{});
    return Element(ElementMap{{generator_name(a), Element(Natural{1})}});
  };
  return cv;
}

/// N ->> N_cap by truncation; a ↦ a is a section.
inline Cover truncation_cover(Natural cap = 2) {
  Cover cv;
  cv.kind = Cover::Kind::truncation;
  cv.upstairs = make_builtin("N");
  cv.downstairs = make_builtin("N2", {{"cap", cap}});
  cv.map = [cap](const Element& x) { return Element(std::min(x.as_natural(), cap)); };
  cv.preimage = [](const Element& a) { return std::optional<Element>(a); };
  return cv;
}

/// Finite map from a finite upstairs monoid; the homomorphism property is checked exhaustively.
inline Cover custom_cover(const Monoid& up, const Monoid& down, const std::map<Element, Element>& table) {
  if (!up.caps().finite) throw cover_error("custom covers need a finite upstairs monoid");
  const auto elems = up.elements();
  for (const auto& x : elems) {
    if (!table.count(x)) throw cover_error("custom cover misses element " + to_string(x));
    if (!down.contains(table.at(x))) throw cover_error("custom cover maps outside " + down.name());
  }
  if (!down.is_zero(table.at(up.zero()))) throw cover_error("custom cover does not map 0 to 0");
  for (const auto& x : elems) {
    for (const auto& y : elems) {
      if (table.at(up.add(x, y)) != down.add(table.at(x), table.at(y))) {
        throw cover_error("custom cover is not a homomorphism at " + to_string(x) + ", " + to_string(y));
      }
    }
  }
  if (down.caps().finite) {
    for (const auto& a : down.elements()) {
      bool hit = false;
      for (const auto& x : elems) hit = hit || table.at(x) == a;
      if (!hit) throw cover_error("custom cover is not surjective onto " + to_string(a));
    }
  }
  Cover cv;
  cv.kind = Cover::Kind::custom;
  cv.upstairs = up;
  cv.downstairs = down;
  cv.map = [table](const Element& x) { return table.at(x); };
  cv.preimage = [table, elems](const Element& a) -> std::optional<Element> {
    for (const auto& x : elems) {
      if (table.at(x) == a) return x;
    }
    return std::nullopt;
  };
  return cv;
}

/// h ∘ W*: annotations mapped down, zeros dropped.
inline KRelation push_down(const KRelation& w, const Cover& cv) {
  if (!w.monoid().same_as(cv.upstairs)) throw cover_error("relation is not over the cover's upstairs monoid");
  KRelation out(cv.downstairs, w.attrs());
  for (const auto& [t, v] : w.annotations()) out.set(t, cv(v));
  return out;
}

struct LiftedRelation {
  KRelation base;
  KRelation lifted;
};

inline bool is_lift(const LiftedRelation& l, const Cover& cv) { return push_down(l.lifted, cv) == l.base; }

/// Every annotation replaced by its chosen preimage (for the free cover: the generator named after it).
inline LiftedRelation canonical_lift(const KRelation& r, const Cover& cv) {
  if (!r.monoid().same_as(cv.downstairs)) throw cover_error("relation is not over the cover's downstairs monoid");
  LiftedRelation out{r, KRelation(cv.upstairs, r.attrs())};
  for (const auto& [t, v] : r.annotations()) {
    auto x = cv.preimage(v);
    if (!x) throw cover_error("no preimage for " + to_string(v) + " under the " + cv.name() + " cover");
    out.lifted.set(t, *x);
  }
  return out;
}

struct LiftedWitness {
  std::vector<LiftedRelation> lifts;
  KRelation witness;  ///< upstairs witness W*
};

/// W* := lift of W, R_i* := W*[Y_i].
inline LiftedWitness lift_global_witness(const KRelation& w, const std::vector<KRelation>& parts, const Cover& cv) {
  if (!verify_witness(w, parts)) throw cover_error("the given relation does not witness the parts");
  LiftedWitness out;
  out.witness = canonical_lift(w, cv).lifted;
  for (const auto& p : parts) out.lifts.push_back({p, marginal(out.witness, p.attrs())});
  for (const auto& l : out.lifts) {
    if (!is_lift(l, cv)) throw cover_error("marginal of the lifted witness is not a lift");
  }
  return out;
}

/// Chase upstairs along the running-intersection listing, then push down.
inline KRelation chase_up_to_free_cover(const std::vector<LiftedRelation>& lifts, const AcyclicityCertificate& cert,
                                        const Cover& cv, std::uint64_t budget = default_budget) {
  std::vector<KRelation> up, down;
  for (const auto& l : lifts) {
    if (!is_lift(l, cv)) throw cover_error("a lifted relation does not map down to its base");
    up.push_back(l.lifted);
    down.push_back(l.base);
  }
  for (std::size_t i = 0; i < up.size(); ++i) {
    for (std::size_t j = i + 1; j < up.size(); ++j) {
      if (check_pair(up[i], up[j], budget).outcome != Outcome::consistent) {
        throw cover_error("lifts " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                          " are not consistent upstairs");
      }
    }
  }
  const KRelation w = push_down(chase_acyclic(up, cert, budget), cv);
  if (!verify_witness(w, down)) throw cover_error("pushed-down witness does not reproduce the base relations");
  return w;
}

struct CoverCounterexample {
  Counterexample base;
  std::vector<LiftedRelation> lifts;
  Element a_star;
};

/// Mod-d relations with annotation d^k·c downstairs and d^k·c* upstairs, carried through the same script.
inline CoverCounterexample generate_cover_counterexample(const Hypergraph& h, const Monoid& m, const Element& c,
                                                         const Cover& cv) {
  if (!m.same_as(cv.downstairs)) throw cover_error("cover does not cover " + m.name());
  auto c_star = cv.preimage(c);
  if (!c_star) throw cover_error("no preimage for " + to_string(c));
  CoverCounterexample out;
  out.base = generate_counterexample(h, m, c);
  const auto& cert = out.base.cert;
  out.a_star = cv.upstairs.times(power_of(static_cast<Natural>(cert.d), cert.k), *c_star);
  const auto core = mod_relations(h, cert, out.base.domains, cv.upstairs, out.a_star);
  const auto up = invert_script(h, cert.deletions, core, out.base.domains);
  for (std::size_t i = 0; i < up.size(); ++i) {
    LiftedRelation l{out.base.relations[i], up[i]};
    if (!is_lift(l, cv)) throw cover_error("constructed lift does not map down to its base");
    out.lifts.push_back(std::move(l));
  }
  return out;
}

struct LiftSearch {
  bool found = false;
  std::uint64_t combinations = 0;   ///< complete lift assignments examined
  std::vector<KRelation> lifts;     ///< when found
};

/**
 * Bounded search for pairwise consistent lifts: every support annotation
 * R(t) is lifted to some candidate x with h(x) = R(t); tuples outside the
 * support stay zero. Pairs are checked as soon as both sides are fixed.
 */
inline LiftSearch search_pairwise_lifts(const std::vector<KRelation>& rels, const Cover& cv,
                                        const std::vector<Element>& candidates) {
  LiftSearch out;
  const std::size_t m = rels.size();
  // per relation: the list of its possible lifts
  std::vector<std::vector<KRelation>> options(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<Tuple, std::vector<Element>>> slots;
    for (const auto& [t, v] : rels[i].annotations()) {
      std::vector<Element> pre;
      for (const auto& x : candidates) {
        if (cv(x) == v) pre.push_back(x);
      }
      slots.emplace_back(t, pre);
    }
    std::vector<KRelation> acc{KRelation(cv.upstairs, rels[i].attrs())};
    for (const auto& [t, pre] : slots) {
      std::vector<KRelation> next;
      for (const auto& r : acc) {
        for (const auto& x : pre) {
          KRelation s = r;
          s.set(t, x);
          next.push_back(std::move(s));
        }
      }
      acc = std::move(next);
    }
    options[i] = std::move(acc);
  }
  std::vector<std::size_t> choice(m, 0);
  std::vector<KRelation> current(m);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) {
    if (i == m) return true;
    for (const auto& opt : options[i]) {
      if (i + 1 == m) ++out.combinations;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) ok = check_pair(current[j], opt).outcome == Outcome::consistent;
      if (!ok) {
        if (i + 1 < m) {
          std::uint64_t rest = 1;
          for (std::size_t q = i + 1; q < m; ++q) rest *= options[q].size();
          out.combinations += rest;
        }
        continue;
      }
      current[i] = opt;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  if (m > 0 && rec(0)) {
    out.found = true;
    out.lifts = current;
  }
  return out;
}

}  // namespace kcons
