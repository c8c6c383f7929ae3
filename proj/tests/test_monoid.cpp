#include "generators.hpp"

#include <gtest/gtest.h>

using namespace kcons;
using kcons::testing::Rng;

namespace {

Element nat(Natural n) { return Element(n); }
Element q(long p, long r = 1) { return Element(Rational(p, r)); }
Element set(std::initializer_list<std::string> xs) { return Element(NameSet(xs)); }

std::vector<Monoid> finite_builtins() {
  return {make_builtin("B"),
          make_builtin("N2"),
          make_builtin("N2", {{"cap", 3}}),
          make_builtin("M2"),
          make_builtin("V", {{"max", 3}}),
          make_builtin("P", {{"universe", {"a", "b", "c"}}}),
          make_builtin("Pk", {{"k", 3}}),
          make_builtin("power", {{"base", {{"name", "B"}}}, {"index", {"i", "j"}}})};
}

}  // namespace

TEST(Catalog, TruncatedAdditionRoundsToTwo) {
  const Monoid n2 = make_builtin("N2");
  EXPECT_EQ(n2.add(nat(1), nat(1)), nat(2));
  EXPECT_EQ(n2.add(nat(2), nat(1)), nat(2));
  EXPECT_EQ(n2.elements(), (std::vector<Element>{nat(0), nat(1), nat(2)}));
}

TEST(Catalog, BooleanDisjunction) {
  const Monoid b = make_builtin("B");
  EXPECT_EQ(b.add(nat(1), nat(1)), nat(1));
  EXPECT_EQ(b.add(nat(0), nat(1)), nat(1));
  EXPECT_EQ(b.elements(), (std::vector<Element>{nat(0), nat(1)}));
  EXPECT_TRUE(b.caps().lattice);
}

TEST(Catalog, TwoElementGroupWithZero) {
  const Monoid m = make_builtin("M2");
  EXPECT_EQ(m.add(nat(1), nat(2)), nat(1));
  EXPECT_EQ(m.add(nat(2), nat(1)), nat(1));
  EXPECT_EQ(m.add(nat(1), nat(1)), nat(2));
  EXPECT_EQ(m.try_subtract(nat(2), nat(1)), nat(1));
  EXPECT_TRUE(m.northwest_capable());
}

TEST(Catalog, TruncatedPowersetEnumeration) {
  const Monoid p3 = make_builtin("Pk", {{"k", 3}});
  EXPECT_EQ(p3.elements(), (std::vector<Element>{nat(0), nat(1), nat(2), nat(3), nat(4)}));
  EXPECT_EQ(p3.add(nat(2), nat(2)), nat(2));
  EXPECT_EQ(p3.add(nat(1), nat(3)), nat(4));
  EXPECT_FALSE(p3.has_transport_property());
}

TEST(Catalog, NaturalSubtraction) {
  const Monoid n = make_builtin("N");
  EXPECT_EQ(n.try_subtract(nat(1), nat(3)), nat(2));
  EXPECT_FALSE(n.try_subtract(nat(3), nat(1)).has_value());
  EXPECT_TRUE(n.caps().cancellative);
  EXPECT_TRUE(n.caps().semiring);
  EXPECT_EQ(n.times(5, nat(3)), nat(15));
}

TEST(Catalog, NeutralElement) {
  for (const Monoid& m : finite_builtins()) {
    for (const auto& p : m.elements()) EXPECT_EQ(m.add(m.zero(), p), p) << m.name();
  }
  const Monoid qm = make_builtin("Q");
  EXPECT_EQ(qm.add(qm.zero(), q(3, 7)), q(3, 7));
}

TEST(Catalog, FreeMonoidAddsCoefficients) {
  const Monoid f = make_builtin("free", {{"generators", {"x", "y"}}});
  const Element x = f.parse({{"x", 1}});
  const Element y2 = f.parse({{"y", 2}});
  EXPECT_EQ(f.add(x, y2), f.parse({{"x", 1}, {"y", 2}}));
  EXPECT_THROW(f.parse({{"z", 1}}), monoid_error);
  EXPECT_TRUE(f.has_transport_property());
}

TEST(Catalog, RationalLiterals) {
  const Monoid qm = make_builtin("Q");
  EXPECT_EQ(qm.parse("3/6"), q(1, 2));
  EXPECT_EQ(qm.parse(2), q(2));
  EXPECT_EQ(qm.render(q(3, 2)), json("3/2"));
  EXPECT_THROW(qm.parse("-1"), monoid_error);
  EXPECT_THROW(qm.parse("1/0"), monoid_error);
  EXPECT_EQ(qm.divide(q(1, 2), q(1, 4)), q(2));
}

TEST(Catalog, GapMonoidRejectsSmallValues) {
  const Monoid r1 = make_builtin("R1");
  EXPECT_EQ(r1.parse("3/2"), q(3, 2));
  EXPECT_THROW(r1.parse("1/2"), monoid_error);
  EXPECT_FALSE(r1.has_transport_property());
  EXPECT_FALSE(r1.caps().finite);
  EXPECT_THROW(r1.downset(q(2)), capability_error);
}

TEST(Catalog, FuzzyMaxMin) {
  const Monoid f = make_builtin("fuzzy");
  EXPECT_EQ(f.add(q(1, 2), q(1, 4)), q(1, 2));
  EXPECT_EQ(f.multiply(q(1, 2), q(1, 4)), q(1, 4));
  EXPECT_THROW(f.parse("3/2"), monoid_error);
  EXPECT_TRUE(f.caps().lattice);
}

TEST(Catalog, Powerset) {
  const Monoid p = make_builtin("P", {{"universe", {"a", "b"}}});
  EXPECT_EQ(p.add(set({"a"}), set({"b"})), set({"a", "b"}));
  EXPECT_EQ(p.multiply(set({"a"}), set({"a", "b"})), set({"a"}));
  EXPECT_EQ(p.elements().size(), 4U);
  EXPECT_THROW(p.parse(json::array({"z"})), monoid_error);
}

TEST(Catalog, Errors) {
  EXPECT_THROW(make_builtin("nope"), monoid_error);
  EXPECT_THROW(make_builtin("N2", {{"cap", 0}}), monoid_error);
  EXPECT_THROW(make_builtin("Pk", {{"k", 0}}), monoid_error);
  EXPECT_THROW(make_builtin("N").elements(), capability_error);
  EXPECT_THROW(make_builtin("N2").multiply(nat(1), nat(1)), capability_error);
  EXPECT_THROW(make_builtin("N2").add(nat(1), nat(3)), monoid_error);
  // non-associative table: 1+1=2, 1+2=0 breaks positivity anyway
  EXPECT_THROW(make_builtin("table", {{"add", {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}}}), monoid_error);
  // commutative, positive, but not associative: (1+1)+2 = 2+2 = 1, 1+(1+2) = 1+2 = 2
  EXPECT_THROW(make_builtin("table", {{"add", {{0, 1, 2}, {1, 2, 2}, {2, 2, 1}}}}), monoid_error);
  // weak cancellativity flag that does not hold
  EXPECT_THROW(make_builtin("table", {{"add", {{0, 1, 2}, {1, 2, 2}, {2, 2, 2}}}, {"weakly_cancellative", true}}),
               monoid_error);
}

TEST(Catalog, CustomTable) {
  const Monoid t = make_builtin("table", {{"add", {{0, 1, 2}, {1, 2, 1}, {2, 1, 2}}},
                                          {"weakly_cancellative", true}, {"totally_preordered", true}});
  EXPECT_EQ(t.add(nat(1), nat(2)), nat(1));
  EXPECT_TRUE(t.northwest_capable());
}

TEST(Catalog, DescriptorRoundTrip) {
  for (const Monoid& m : finite_builtins()) {
    const Monoid again = make_monoid(m.descriptor());
    EXPECT_EQ(again.name(), m.name());
    EXPECT_EQ(again.elements(), m.elements());
  }
}

TEST(Catalog, TransportPropertyIsDerived) {
  EXPECT_TRUE(make_builtin("B").has_transport_property());
  EXPECT_TRUE(make_builtin("N").has_transport_property());
  EXPECT_TRUE(make_builtin("Q").has_transport_property());
  EXPECT_TRUE(make_builtin("M2").has_transport_property());
  EXPECT_FALSE(make_builtin("N2").has_transport_property());
  EXPECT_FALSE(make_builtin("R1").has_transport_property());
  EXPECT_TRUE(make_builtin("power", {{"base", {{"name", "N"}}}, {"index", {"1", "2"}}}).has_transport_property());
  EXPECT_FALSE(make_builtin("power", {{"base", {{"name", "N2"}}}, {"index", {"1", "2"}}}).has_transport_property());
}

// --- properties -------------------------------------------------------------

TEST(MonoidProperties, FiniteAxiomsExhaustive) {
  for (const Monoid& m : finite_builtins()) {
    const auto el = m.elements();
    EXPECT_EQ(el.front(), m.zero()) << m.name();
    for (const auto& p : el) {
      for (const auto& r : el) {
        EXPECT_EQ(m.add(p, r), m.add(r, p)) << m.name();
        if (m.is_zero(m.add(p, r))) {
          EXPECT_TRUE(m.is_zero(p) && m.is_zero(r)) << m.name();
        }
        for (const auto& s : el) EXPECT_EQ(m.add(m.add(p, r), s), m.add(p, m.add(r, s))) << m.name();
      }
    }
  }
}

TEST(MonoidProperties, SubtractionWitnessAndTotality) {
  Rng rng(11);
  std::vector<Monoid> ms = finite_builtins();
  ms.push_back(make_builtin("N"));
  ms.push_back(make_builtin("Q"));
  ms.push_back(make_builtin("fuzzy"));
  for (const Monoid& m : ms) {
    if (!m.caps().preorder) continue;
    for (int i = 0; i < 200; ++i) {
      const Element b = kcons::testing::coin(rng, 0.2) ? m.zero() : kcons::testing::random_nonzero(m, rng);
      const Element c = kcons::testing::random_nonzero(m, rng);
      if (auto a = m.try_subtract(b, c)) {
        EXPECT_EQ(m.add(b, *a), c) << m.name();
      }
      if (m.caps().totally_preordered) {
        EXPECT_TRUE(m.leq(b, c) || m.leq(c, b)) << m.name();
      }
    }
  }
}

TEST(MonoidProperties, FreePositivity) {
  const Monoid f = make_builtin("free", {{"generators", {"x", "y", "z"}}});
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    json a = json::object(), b = json::object();
    for (const char* g : {"x", "y", "z"}) {
      if (kcons::testing::coin(rng)) a[g] = kcons::testing::uniform_int(rng, 0, 3);
      if (kcons::testing::coin(rng)) b[g] = kcons::testing::uniform_int(rng, 0, 3);
    }
    const Element fa = f.parse(a), fb = f.parse(b);
    if (f.is_zero(f.add(fa, fb))) {
      EXPECT_TRUE(f.is_zero(fa));
      EXPECT_TRUE(f.is_zero(fb));
    }
  }
}

TEST(MonoidProperties, PowerAdditionIsPointwise) {
  const Monoid base = make_builtin("N2");
  const Monoid pw = make_builtin("power", {{"base", {{"name", "N2"}}}, {"index", {"i", "j", "k"}}});
  const auto el = pw.elements();
  ASSERT_EQ(el.size(), 27U);
  for (const auto& f : el) {
    for (const auto& g : el) {
      const Element s = pw.add(f, g);
      for (const char* key : {"i", "j", "k"}) {
        auto at = [&](const Element& e) {
          const Element* v = e.find(key);
          return v ? *v : base.zero();
        };
        EXPECT_EQ(at(s), base.add(at(f), at(g)));
      }
    }
  }
}

TEST(MonoidProperties, LatticeAbsorptionAndIdempotence) {
  for (const Monoid& m : {make_builtin("B"), make_builtin("V", {{"max", 4}}),
                          make_builtin("P", {{"universe", {"a", "b", "c"}}})}) {
    for (const auto& p : m.elements()) {
      EXPECT_EQ(m.multiply(p, p), p);
      for (const auto& r : m.elements()) EXPECT_EQ(m.add(p, m.multiply(p, r)), p);
    }
  }
  const Monoid f = make_builtin("fuzzy");
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Element p = kcons::testing::random_nonzero(f, rng), r = kcons::testing::random_nonzero(f, rng);
    EXPECT_EQ(f.multiply(p, p), p);
    EXPECT_EQ(f.add(p, f.multiply(p, r)), p);
  }
}

TEST(MonoidProperties, LiteralRoundTrip) {
  Rng rng(9);
  std::vector<Monoid> ms = finite_builtins();
  ms.push_back(make_builtin("N"));
  ms.push_back(make_builtin("Q"));
  ms.push_back(make_builtin("fuzzy"));
  ms.push_back(make_builtin("R1"));
  for (const Monoid& m : ms) {
    for (int i = 0; i < 50; ++i) {
      Element e = m.name() == "R1" ? Element(Rational(kcons::testing::uniform_int(rng, 4, 20), 4))
                                   : kcons::testing::random_nonzero(m, rng);
      EXPECT_EQ(m.parse(m.render(e)), e) << m.name();
      EXPECT_EQ(element_from_name(m, to_string(e)), e) << m.name();
    }
  }
}

TEST(Element, CheckedArithmetic) {
  EXPECT_THROW(checked_add(std::numeric_limits<Natural>::max(), 1), std::overflow_error);
  EXPECT_THROW(checked_mul(std::numeric_limits<Natural>::max(), 2), std::overflow_error);
  EXPECT_EQ(checked_mul(6, 7), 42U);
}

TEST(Element, Rendering) {
  EXPECT_EQ(to_string(nat(3)), "3");
  EXPECT_EQ(to_string(q(2, 4)), "1/2");
  EXPECT_EQ(to_string(set({"b", "a"})), "{a,b}");
  EXPECT_THROW(nat(1).as_rational(), element_error);
}
