#include "generators.hpp"

#include <gtest/gtest.h>

using namespace kcons;
namespace kt = kcons::testing;

namespace {

KRelation make(const Monoid& m, const DomainMap& d, std::vector<std::string> attrs,
               std::vector<std::pair<std::vector<std::string>, json>> rows) {
  KRelation r(m, AttributeSet(attrs, d));
  for (auto& [vals, lit] : rows) {
    std::map<std::string, std::string> named;
    for (std::size_t i = 0; i < attrs.size(); ++i) named[attrs[i]] = vals[i];
    r.accumulate(r.tuple(named), m.parse(lit));
  }
  return r;
}

/// Relational join of supports, computed on names.
std::set<kt::oracle::NamedTuple> relational_join(const KRelation& r, const KRelation& s) {
  std::set<kt::oracle::NamedTuple> out;
  for (const auto& [a, x] : kt::oracle::named(r)) {
    for (const auto& [b, y] : kt::oracle::named(s)) {
      bool agree = true;
      for (const auto& [k, v] : a) {
        auto it = b.find(k);
        agree = agree && (it == b.end() || it->second == v);
      }
      if (!agree) continue;
      auto u = a;
      u.insert(b.begin(), b.end());
      out.insert(u);
    }
  }
  return out;
}

std::set<kt::oracle::NamedTuple> keys(const KRelation& r) {
  std::set<kt::oracle::NamedTuple> out;
  for (const auto& [k, v] : kt::oracle::named(r)) out.insert(k);
  return out;
}

bool no_zeros(const KRelation& r) {
  for (const auto& [t, v] : r.annotations()) {
    if (r.monoid().is_zero(v)) return false;
  }
  return true;
}

const DomainMap small{{"A", {"1", "2"}}, {"B", {"1", "2"}}, {"C", {"1", "2"}}};
const DomainMap abc{{"A", {"a", "a1", "a2"}}, {"B", {"b"}}, {"C", {"c", "c1", "c2"}}};

}  // namespace

TEST(StandardJoin, NaturalsCounterexample) {
  const Monoid n = make_builtin("N");
  const KRelation r = make(n, small, {"A", "B"}, {{{"1", "2"}, 1}, {{"2", "2"}, 1}});
  const KRelation s = make(n, small, {"B", "C"}, {{{"2", "1"}, 1}, {{"2", "2"}, 1}});
  const KRelation w = standard_join(r, s);
  EXPECT_EQ(w.support_size(), 4U);
  for (const auto& [t, v] : w.annotations()) EXPECT_EQ(v, Element(Natural{1}));
  EXPECT_FALSE(verify_witness(w, {r, s}));
  // the witnessing joins still work
  EXPECT_TRUE(verify_witness(northwest_join(r, s), {r, s}));
}

TEST(StandardJoin, BooleanIsRelationalJoin) {
  const Monoid b = make_builtin("B");
  const KRelation r = make(b, small, {"A", "B"}, {{{"1", "2"}, 1}, {{"2", "2"}, 1}, {{"2", "1"}, 1}});
  const KRelation s = make(b, small, {"B", "C"}, {{{"2", "1"}, 1}, {{"1", "2"}, 1}});
  EXPECT_EQ(keys(standard_join(r, s)), relational_join(r, s));
}

TEST(StandardJoin, FuzzyMin) {
  const Monoid f = make_builtin("fuzzy");
  const KRelation r = make(f, abc, {"A", "B"}, {{{"a", "b"}, "1/2"}});
  const KRelation s = make(f, abc, {"B", "C"}, {{{"b", "c"}, "1/4"}});
  const KRelation w = standard_join(r, s);
  ASSERT_EQ(w.support_size(), 1U);
  EXPECT_EQ(w.annotations().begin()->second, f.parse("1/4"));
  EXPECT_THROW(standard_join(make(make_builtin("N2"), abc, {"A"}, {}), make(make_builtin("N2"), abc, {"C"}, {})),
               capability_error);
}

TEST(VorobevJoin, HandEvaluated) {
  const Monoid q = make_builtin("Q");
  const KRelation r = make(q, abc, {"A", "B"}, {{{"a1", "b"}, "1/2"}, {{"a2", "b"}, "1/2"}});
  const KRelation s = make(q, abc, {"B", "C"}, {{{"b", "c1"}, "1/4"}, {{"b", "c2"}, "3/4"}});
  const KRelation w = vorobev_join(r, s);
  const KRelation expected = make(q, abc, {"A", "B", "C"},
                                  {{{"a1", "b", "c1"}, "1/8"},
                                   {{"a1", "b", "c2"}, "3/8"},
                                   {{"a2", "b", "c1"}, "1/8"},
                                   {{"a2", "b", "c2"}, "3/8"}});
  EXPECT_EQ(w, expected);
  EXPECT_TRUE(verify_witness(w, {r, s}));
}

TEST(VorobevJoin, IdenticalSingleTuple) {
  const Monoid q = make_builtin("Q");
  const KRelation r = make(q, abc, {"A", "B"}, {{{"a1", "b"}, "5/3"}});
  EXPECT_EQ(vorobev_join(r, r), r);
  const KRelation bad = make(q, abc, {"B", "C"}, {{{"b", "c1"}, "1"}});
  EXPECT_THROW(vorobev_join(r, bad), join_error);
  EXPECT_THROW(vorobev_join(make(make_builtin("N"), abc, {"A"}, {}), make(make_builtin("N"), abc, {"C"}, {})),
               capability_error);
}

TEST(NorthwestJoin, BlockSolve) {
  const Monoid n = make_builtin("N");
  const KRelation r = make(n, abc, {"A", "B"}, {{{"a1", "b"}, 3}, {{"a2", "b"}, 2}});
  const KRelation s = make(n, abc, {"B", "C"}, {{{"b", "c1"}, 1}, {{"b", "c2"}, 4}});
  const KRelation w = northwest_join(r, s);
  const KRelation expected =
      make(n, abc, {"A", "B", "C"}, {{{"a1", "b", "c1"}, 1}, {{"a1", "b", "c2"}, 2}, {{"a2", "b", "c2"}, 2}});
  EXPECT_EQ(w, expected);
  EXPECT_LE(w.support_size(), r.support_size() + s.support_size());
}

TEST(NorthwestJoin, SingleBlockSingleTuple) {
  const Monoid n = make_builtin("N");
  const KRelation r = make(n, abc, {"A", "B"}, {{{"a", "b"}, 4}});
  const KRelation s = make(n, abc, {"B", "C"}, {{{"b", "c"}, 4}});
  EXPECT_EQ(northwest_join(r, s).support_size(), 1U);
  EXPECT_THROW(northwest_join(r, make(n, abc, {"B", "C"}, {{{"b", "c"}, 3}})), join_error);
}

TEST(ComponentwiseJoin, FreeMonoid) {
  const Monoid f = make_builtin("free", {{"generators", {"x", "y"}}});
  const KRelation r = make(f, abc, {"A", "B"}, {{{"a1", "b"}, {{"x", 1}, {"y", 1}}}, {{"a2", "b"}, {{"x", 1}}}});
  const KRelation s = make(f, abc, {"B", "C"}, {{{"b", "c1"}, {{"x", 1}}}, {{"b", "c2"}, {{"x", 1}, {"y", 1}}}});
  const KRelation w = componentwise_join(r, s);
  EXPECT_TRUE(verify_witness(w, {r, s}));
  EXPECT_TRUE(no_zeros(w));
  // two components, each northwest-sparse
  EXPECT_LE(w.support_size(), 2 * (r.support_size() + s.support_size()));
}

TEST(ComponentwiseJoin, SingleComponentMatchesBase) {
  const Monoid pn = make_builtin("power", {{"base", {{"name", "N"}}}, {"index", {"k"}}});
  const Monoid n = make_builtin("N");
  kt::Rng rng(6);
  for (int i = 0; i < 30; ++i) {
    const auto p = kt::consistent_pair(n, rng);
    auto lift = [&](const KRelation& rel) {
      KRelation out(pn, rel.attrs());
      for (const auto& [t, v] : rel.annotations()) out.set(t, Element(ElementMap{{"k", v}}));
      return out;
    };
    EXPECT_EQ(componentwise_join(lift(p.r), lift(p.s)), lift(northwest_join(p.r, p.s)));
  }
}

TEST(ComponentwiseJoin, EmptyRelations) {
  const Monoid f = make_builtin("free");
  const KRelation r = make(f, abc, {"A", "B"}, {});
  const KRelation s = make(f, abc, {"B", "C"}, {});
  const KRelation w = componentwise_join(r, s);
  EXPECT_TRUE(w.empty());
  EXPECT_TRUE(verify_witness(w, {r, s}));
}

TEST(JoinDispatch, Defaults) {
  EXPECT_EQ(default_join_method(make_builtin("B")), JoinMethod::standard);
  EXPECT_EQ(default_join_method(make_builtin("N")), JoinMethod::northwest);
  EXPECT_EQ(default_join_method(make_builtin("free")), JoinMethod::componentwise);
  EXPECT_EQ(default_join_method(make_builtin("N2")), JoinMethod::exhaustive);
  EXPECT_FALSE(default_join_method(make_builtin("R1")).has_value());
  EXPECT_EQ(parse_join_method("vorobev"), JoinMethod::vorobev);
  EXPECT_THROW(parse_join_method("hash"), join_error);
}

// --- properties -------------------------------------------------------------

TEST(JoinProperties, WitnessingJoinsVerify) {
  kt::Rng rng(99);
  struct Case {
    Monoid m;
    JoinMethod method;
  };
  const std::vector<Case> cases{{make_builtin("N"), JoinMethod::northwest},
                                {make_builtin("M2"), JoinMethod::northwest},
                                {make_builtin("Q"), JoinMethod::vorobev},
                                {make_builtin("Q"), JoinMethod::northwest},
                                {make_builtin("B"), JoinMethod::standard},
                                {make_builtin("fuzzy"), JoinMethod::standard},
                                {make_builtin("P", {{"universe", {"p", "q", "r"}}}), JoinMethod::standard},
                                {make_builtin("N2"), JoinMethod::exhaustive},
                                {make_builtin("power", {{"base", {{"name", "N"}}}, {"index", {"i", "j"}}}),
                                 JoinMethod::componentwise}};
  for (const auto& c : cases) {
    for (int i = 0; i < 40; ++i) {
      kt::Pair p;
      if (c.m.kind() == Element::Kind::map) {
        const DomainMap d = kt::make_domains({"A", "B", "C"}, rng, 3);
        KRelation joint(c.m, AttributeSet({"A", "B", "C"}, d));
        for_each_tuple(joint.attrs(), [&](const Tuple& t) {
          if (kt::coin(rng, 0.3)) {
            ElementMap e;
            if (kt::coin(rng)) e.emplace_back("i", Element(Natural(kt::uniform_int(rng, 1, 3))));
            if (kt::coin(rng)) e.emplace_back("j", Element(Natural(kt::uniform_int(rng, 1, 3))));
            joint.set(t, Element(e));
          }
          return true;
        });
        p = {joint, marginal(joint, std::vector<std::string>{"A", "B"}), marginal(joint, std::vector<std::string>{"B", "C"})};
      } else {
        p = kt::consistent_pair(c.m, rng);
      }
      if (c.method == JoinMethod::exhaustive && (p.r.support_size() > 5 || p.s.support_size() > 5)) continue;
      const KRelation w = join(p.r, p.s, c.method);
      EXPECT_TRUE(kt::oracle::witnesses(w, {p.r, p.s})) << c.m.name() << " " << to_string(c.method);
      EXPECT_TRUE(no_zeros(w));
    }
  }
}

TEST(JoinProperties, NorthwestSparsity) {
  kt::Rng rng(123);
  const Monoid n = make_builtin("N");
  for (int i = 0; i < 200; ++i) {
    const auto p = kt::consistent_pair(n, rng, 4, 0.4, 16);
    const KRelation w = northwest_join(p.r, p.s);
    EXPECT_LE(w.support_size(), p.r.support_size() + p.s.support_size());
  }
}

TEST(JoinProperties, StandardSupportIsRelationalJoinOnLattices) {
  kt::Rng rng(5);
  for (const Monoid& m : {make_builtin("B"), make_builtin("fuzzy"), make_builtin("V", {{"max", 3}})}) {
    for (int i = 0; i < 50; ++i) {
      const DomainMap d = kt::make_domains({"A", "B", "C"}, rng, 3);
      const KRelation r = kt::random_relation(m, AttributeSet({"A", "B"}, d), rng, 0.5);
      const KRelation s = kt::random_relation(m, AttributeSet({"B", "C"}, d), rng, 0.5);
      EXPECT_EQ(keys(standard_join(r, s)), relational_join(r, s));
    }
  }
}
