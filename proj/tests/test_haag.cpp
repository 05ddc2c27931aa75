#include <gtest/gtest.h>

#include <random>

#include "stabnet/errors.hpp"
#include "stabnet/haag.hpp"
#include "support.hpp"

using namespace stabnet;

namespace {

std::vector<PartialPermutation> outside_generators(const LocalAlgebra& ambient, const SiteSet& F) {
  std::vector<PartialPermutation> gens;
  const SiteSet outside = F.complement_in(ambient.support());
  for (const auto& C : outside.components())
    for (auto& p : included_interval_generators(restricted_algebra(ambient, C), ambient)) gens.push_back(std::move(p));
  return gens;
}

std::size_t power(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= base;
  return r;
}

}  // namespace

TEST(SiteSetTest, ComponentsAndComplement) {
  const SiteSet F({4, 0, 2, 1});
  ASSERT_EQ(F.components().size(), 2u);
  EXPECT_EQ(F.components()[0], Interval(0, 2));
  EXPECT_EQ(F.components()[1], Interval(4, 4));
  EXPECT_EQ(F.size(), 4u);
  EXPECT_EQ(F.complement_in(Interval(0, 5)).sites(), (std::vector<long>{3, 5}));
  EXPECT_EQ(F.enlarged(1, Interval(0, 5)).sites(), (std::vector<long>{0, 1, 2, 3, 4, 5}));
  EXPECT_TRUE(SiteSet::of(Interval(0, 3)).complement_in(Interval(0, 3)).empty());
}

TEST(UnitCommutantTest, AgreesWithDenseSolver) {
  struct Case {
    std::shared_ptr<const Graph> g;
    Interval Lambda;
    SiteSet F;
  };
  const std::vector<Case> cases = {
      {test::fibonacci(), Interval(0, 3), SiteSet::of(Interval(1, 2))},
      {test::fibonacci(), Interval(0, 3), SiteSet({0, 2})},
      {test::fibonacci(), Interval(0, 4), SiteSet({2})},
      {test::loops(2), Interval(0, 2), SiteSet({1})},
      {std::make_shared<const Graph>(Graph(2, {{1, 2}, {1, 1}})), Interval(0, 2), SiteSet({1})},
  };
  for (const auto& c : cases) {
    const LocalAlgebra A(c.g, c.Lambda);
    const auto gens = outside_generators(A, c.F);
    std::vector<BlockOperator> dense_gens;
    for (const auto& p : gens) dense_gens.push_back(p.dense());
    const auto sparse = unit_commutant(gens, A);
    const auto dense = commutant(dense_gens, A);
    ASSERT_EQ(sparse.size(), dense.size()) << c.F.to_string();
    // same span: each sparse element lies in the dense span
    for (const auto& p : sparse) {
      BlockOperator rest = p.dense();
      for (const auto& b : dense) rest -= b.hs_inner(rest) * b;
      EXPECT_LE(rest.norm(), 1e-10);
      for (const auto& g : dense_gens) EXPECT_EQ(commutator(p.dense(), g).max_abs(), 0.0);
    }
  }
}

TEST(UnitCommutantTest, RejectsNonPermutation) {
  const LocalAlgebra A(test::loops(2), Interval(0, 0));
  // two entries in row 0
  const PartialPermutation bad{A, {{{0, 0}, {0, 1}}}};
  EXPECT_THROW(unit_commutant({bad}, A), InputError);
}

TEST(SparseUnitSpanTest, ResidualMatchesProjection) {
  std::mt19937_64 rng(6);
  const LocalAlgebra A(test::fibonacci(), Interval(0, 3));
  const auto span = SparseUnitSpan::included_subalgebra(SiteSet::of(Interval(1, 2)), A);
  EXPECT_EQ(span.dimension(), LocalAlgebra(A.graph_ptr(), Interval(1, 2)).dimension());
  const auto x = random_operator(A, rng);
  EXPECT_NEAR(span.residual(x), (x - span.project(x)).norm(), 1e-12);
  EXPECT_GT(span.times_center().dimension(), span.dimension());
  for (const auto& u : span.units()) EXPECT_LE(span.residual(u.dense()), 1e-12);
}

TEST(HaagTest, SpinChainInteriorSite) {
  for (std::size_t D : {2u, 3u}) {
    const auto rep = haag_check(test::loops(D), Interval(0, 2), SiteSet({1}), std::nullopt, 1e-12);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.commutant_dim, D * D);
    EXPECT_EQ(rep.subalgebra_dim, D * D);
    EXPECT_EQ(rep.minimal_radius, 0);
    EXPECT_LE(rep.containment_residual, 1e-12);
  }
}

TEST(HaagTest, NonIntervalSubset) {
  for (std::size_t D : {2u, 3u}) {
    const auto rep = haag_check(test::loops(D), Interval(0, 3), SiteSet({0, 2}), std::nullopt, 1e-12);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.commutant_dim, power(D, 4));
  }
}

TEST(HaagTest, StabilizedSingleLoop) {
  const auto rep = haag_check(test::graph_file("single_loop"), Interval(0, 2), SiteSet({1}), 2, 1e-12);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.commutant_dim, 4u);
  const auto wide = haag_check(test::graph_file("single_loop"), Interval(0, 3), SiteSet({0, 2}), 2, 1e-12);
  EXPECT_TRUE(wide.pass);
  EXPECT_EQ(wide.commutant_dim, 16u);
}

TEST(HaagTest, FibonacciLiteralFailsByTheCenter) {
  const auto g = test::fibonacci();
  const auto rep = haag_check(g, Interval(0, 3), SiteSet::of(Interval(1, 2)), std::nullopt, 1e-10);
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.commutant_dim, 21u);
  EXPECT_EQ(rep.subalgebra_dim, 7u);
  EXPECT_EQ(rep.minimal_radius, 1);

  const auto centered = haag_check(g, Interval(0, 3), SiteSet::of(Interval(1, 2)), std::nullopt, 1e-10, 0, true);
  EXPECT_TRUE(centered.pass);
  EXPECT_EQ(centered.commutant_dim, centered.subalgebra_dim);
}

TEST(HaagTest, FibonacciModuloCenterAcrossWindows) {
  const auto g = test::fibonacci();
  for (long last = 2; last <= 4; ++last)
    for (long lo = 0; lo <= last; ++lo)
      for (long hi = lo; hi <= last; ++hi) {
        if (lo == 0 && hi == last) continue;
        const auto rep = haag_check(g, Interval(0, last), SiteSet::of(Interval(lo, hi)), std::nullopt, 1e-10, 0, true);
        EXPECT_TRUE(rep.pass) << lo << " " << hi << " in [0," << last << "]";
        EXPECT_LE(rep.containment_residual, 1e-10);
      }
}

TEST(HaagTest, DegenerateAndInvalidSubsets) {
  const auto g = test::fibonacci();
  const auto rep = haag_check(g, Interval(0, 2), SiteSet::of(Interval(0, 2)), std::nullopt, 1e-10);
  EXPECT_TRUE(rep.pass);
  EXPECT_FALSE(rep.warnings.empty());
  EXPECT_THROW(haag_check(g, Interval(0, 2), SiteSet({3}), std::nullopt, 1e-10), DomainError);
}

TEST(NetTest, ShippedGraphsSatisfyAxioms) {
  std::mt19937_64 rng(31);
  for (const auto& g : {test::graph_file("single_loop"), test::fibonacci(), test::loops(2)}) {
    const auto rep = validate_net(g, 4, rng);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.axioms.size(), 6u);
    for (const auto& a : rep.axioms) EXPECT_TRUE(a.pass) << a.name << " " << a.residual;
  }
}

// Every local operator is pushed to the right end of the target interval: still a
// unital *-homomorphism, but operators on disjoint intervals collide.
TEST(NetTest, MisplacedInclusionBreaksLocality) {
  std::mt19937_64 rng(32);
  const InclusionMap misplaced = [](const BlockOperator& f, const Interval& J) {
    const Interval I = f.algebra().support();
    const long len = static_cast<long>(I.length());
    BlockOperator moved(LocalAlgebra(f.algebra().graph_ptr(), Interval(J.hi - len + 1, J.hi)));
    const std::size_t t = f.algebra().vertex_count();
    for (Vertex i = 0; i < t; ++i)
      for (Vertex j = 0; j < t; ++j) moved.block(i, j) = f.block(i, j);
    return include(moved, J);
  };
  const auto rep = validate_net(test::loops(2), 3, rng, 1e-12, misplaced);
  EXPECT_FALSE(rep.pass);
  for (const auto& a : rep.axioms) {
    if (a.name == "locality") EXPECT_FALSE(a.pass);
    if (a.name == "unital" || a.name == "multiplicative" || a.name == "star") EXPECT_TRUE(a.pass) << a.name;
  }
}
