#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stabnet/subalgebra.hpp"
#include "support.hpp"

using namespace stabnet;

namespace {

std::vector<BlockOperator> all_units(const LocalAlgebra& A) {
  std::vector<BlockOperator> out;
  const std::size_t t = A.vertex_count();
  for (Vertex i = 0; i < t; ++i)
    for (Vertex j = 0; j < t; ++j)
      for (std::size_t r = 0; r < A.block_dim(i, j); ++r)
        for (std::size_t c = 0; c < A.block_dim(i, j); ++c) out.push_back(BlockOperator::matrix_unit(A, i, j, r, c));
  return out;
}

std::vector<BlockOperator> site_units(const LocalAlgebra& ambient, const Interval& C) {
  std::vector<BlockOperator> out;
  for (const auto& p : included_interval_generators(restricted_algebra(ambient, C), ambient)) out.push_back(p.dense());
  return out;
}

}  // namespace

TEST(JonesTest, TemperleyLiebRelationsFibonacci) {
  const auto g = test::fibonacci();
  const auto td = compute_trace_data(*g);
  for (long hi = 1; hi <= 4; ++hi) {
    const auto e = tl_generators(g, td, Interval(0, hi));
    ASSERT_EQ(e.size(), static_cast<std::size_t>(hi));
    const auto res = check_tl_relations(e, td.eigenvalue);
    EXPECT_LE(res.idempotent, 1e-12);
    EXPECT_LE(res.selfadjoint, 1e-12);
    EXPECT_LE(res.braid, 1e-12);
    EXPECT_LE(res.commuting, 1e-12);
  }
}

TEST(JonesTest, MarkovTraceIsLambdaToMinusTwo) {
  for (const auto& g : {test::fibonacci(), test::loops(3)}) {
    const auto td = compute_trace_data(*g);
    const auto e = jones_projection(g, td, Interval(0, 3), 1);
    EXPECT_NEAR(std::abs(markov_trace(e, td) - 1.0 / (td.eigenvalue * td.eigenvalue)), 0.0, 1e-12);
  }
}

TEST(JonesTest, LoopGraphMatrix) {
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto g = test::loops(m);
    const auto td = compute_trace_data(*g);
    const auto e = jones_projection(g, td, Interval(0, 1), 0);
    Matrix expect = Matrix::Zero(static_cast<Eigen::Index>(m * m), static_cast<Eigen::Index>(m * m));
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t r = 0; r < m; ++r)
        expect(static_cast<Eigen::Index>(q * (m + 1)), static_cast<Eigen::Index>(r * (m + 1))) = 1.0 / static_cast<double>(m);
    EXPECT_LE((e.block(0, 0) - expect).cwiseAbs().maxCoeff(), 1e-14);
    const auto res = check_tl_relations(tl_generators(g, td, Interval(0, 3)), td.eigenvalue);
    EXPECT_LE(std::max({res.idempotent, res.braid, res.commuting}), 1e-12);
  }
}

TEST(JonesTest, BrokenRelationIsDetected) {
  const auto g = test::fibonacci();
  const auto td = compute_trace_data(*g);
  auto e = tl_generators(g, td, Interval(0, 2));
  EXPECT_GT(check_tl_relations(e, 2.0).braid, 1e-3);
  e[0] = 2.0 * e[0];
  EXPECT_GT(check_tl_relations(e, td.eigenvalue).idempotent, 0.5);
}

TEST(ExpectationTest, WholeAlgebraGivesIdentity) {
  std::mt19937_64 rng(51);
  const auto g = test::fibonacci();
  const auto td = compute_trace_data(*g);
  const LocalAlgebra A(g, Interval(0, 1));
  const auto E = conditional_expectation({A, all_units(A)}, td);
  EXPECT_EQ(E.subalgebra_basis.size(), A.dimension());
  const auto x = random_operator(A, rng);
  EXPECT_LE((E.apply(x) - x).max_abs(), 1e-10);
}

TEST(ExpectationTest, ScalarsGiveTrace) {
  std::mt19937_64 rng(52);
  const auto g = test::fibonacci();
  const auto td = compute_trace_data(*g);
  const LocalAlgebra A(g, Interval(0, 2));
  const auto E = conditional_expectation({A, {}}, td);
  ASSERT_EQ(E.subalgebra_basis.size(), 1u);
  for (int s = 0; s < 4; ++s) {
    const auto x = random_operator(A, rng);
    EXPECT_LE((E.apply(x) - markov_trace(x, td) * BlockOperator::identity(A)).max_abs(), 1e-12);
  }
}

TEST(ExpectationTest, TemperleyLiebSubalgebraProperties) {
  std::mt19937_64 rng(53);
  const auto g = test::fibonacci();
  const auto td = compute_trace_data(*g);
  for (long hi = 2; hi <= 3; ++hi) {
    const SubalgebraSpec spec{LocalAlgebra(g, Interval(0, hi)), tl_generators(g, td, Interval(0, hi))};
    const auto E = conditional_expectation(spec, td);
    const auto res = check_expectation(E, td, rng, 10);
    EXPECT_LE(res.idempotent, 1e-10);
    EXPECT_LE(res.unital, 1e-10);
    EXPECT_LE(res.bimodule, 1e-10);
    EXPECT_LE(res.trace, 1e-10);
    EXPECT_LE(res.positivity, 1e-10);
  }
}

TEST(ExpectationTest, IndependentOfGeneratorPresentation) {
  const auto g = test::fibonacci();
  const auto td = compute_trace_data(*g);
  const LocalAlgebra A(g, Interval(0, 3));
  auto gens = tl_generators(g, td, A.support());
  const auto E1 = conditional_expectation({A, gens}, td);
  std::vector<BlockOperator> other = {gens[0] + gens[2], gens[1], gens[0] * gens[1] + gens[1] * gens[0], gens[2]};
  const auto E2 = conditional_expectation({A, other}, td);
  EXPECT_EQ(E1.subalgebra_basis.size(), E2.subalgebra_basis.size());
  EXPECT_LE((E1.matrix - E2.matrix).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PimsnerPopaTest, TrivialAndDiagonal) {
  const auto td2 = compute_trace_data(*test::loops(2));
  const LocalAlgebra M2(test::loops(2), Interval(0, 0));
  const SubalgebraSpec whole{M2, all_units(M2)};
  const auto Ew = conditional_expectation(whole, td2);
  EXPECT_EQ(pp_basis(whole, Ew, td2).elements.size(), 1u);

  const SubalgebraSpec diagonal{M2, {BlockOperator::matrix_unit(M2, 0, 0, 0, 0)}};
  const auto Ed = conditional_expectation(diagonal, td2);
  EXPECT_EQ(Ed.subalgebra_basis.size(), 2u);
  const auto pp = pp_basis(diagonal, Ed, td2);
  EXPECT_GE(pp.elements.size(), 2u);
  EXPECT_LE(pp.residual, 1e-10);
  EXPECT_LE(pp_reconstruction_residual(pp.elements, Ed, all_units(M2)), 1e-10);
}

TEST(PimsnerPopaTest, TemperleyLiebInFibonacci) {
  const auto g = test::fibonacci();
  const auto td = compute_trace_data(*g);
  const SubalgebraSpec spec{LocalAlgebra(g, Interval(0, 2)), tl_generators(g, td, Interval(0, 2))};
  const auto E = conditional_expectation(spec, td);
  const auto pp = pp_basis(spec, E, td);
  EXPECT_LE(pp.residual, 1e-8);
  EXPECT_LE(pp_reconstruction_residual(pp.elements, E, all_units(spec.ambient)), 1e-8);
  // a basis with an element missing cannot reconstruct
  auto short_basis = pp.elements;
  short_basis.pop_back();
  EXPECT_GT(pp_reconstruction_residual(short_basis, E, all_units(spec.ambient)), 1e-3);
}

TEST(RelativeHaagTest, BoundaryUnitsAndEmptyGenerators) {
  const LocalAlgebra A(test::loops(2), Interval(0, 2));
  auto gens = site_units(A, Interval(0, 0));
  for (auto& x : site_units(A, Interval(2, 2))) gens.push_back(std::move(x));
  const auto rep = relative_haag_check(A, gens, SiteSet({1}), 1e-10, 0);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.commutant_dim, 4u);

  const auto empty = relative_haag_check(A, {}, SiteSet({1}), 1e-10, 0);
  EXPECT_EQ(empty.commutant_dim, A.dimension());
  EXPECT_FALSE(empty.warnings.empty());
  EXPECT_FALSE(empty.pass);
}
