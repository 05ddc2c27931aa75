#include <gtest/gtest.h>

#include <random>

#include "stabnet/block_algebra.hpp"
#include "stabnet/haag.hpp"
#include "stabnet/linalg.hpp"
#include "support.hpp"

using namespace stabnet;

namespace {

std::vector<BlockOperator> dense(const std::vector<PartialPermutation>& units) {
  std::vector<BlockOperator> out;
  for (const auto& u : units) out.push_back(u.dense());
  return out;
}

std::vector<BlockOperator> site_generators(const LocalAlgebra& ambient, const Interval& C) {
  return dense(included_interval_generators(restricted_algebra(ambient, C), ambient));
}

// Distance of x from the span of an orthonormal basis.
double span_residual(const std::vector<BlockOperator>& basis, const BlockOperator& x) {
  BlockOperator rest = x;
  for (const auto& b : basis) rest -= b.hs_inner(x) * b;
  return rest.norm();
}

// A_{[0,0]} and A_{[3,3]} inside A_{[0,3]}: the ambient block (x, y) splits into sectors
// (a, b) = (C^{N_xa} (x) C^{N^2_ab} (x) C^{N_by}); both site algebras act as full matrix
// algebras on the outer factors, so the commutant is (+) B(C^{N^2_ab}) over admissible sectors.
std::size_t boundary_commutant_dim(const Graph& g) {
  const auto n2 = g.power(2);
  std::size_t dim = 0;
  const std::size_t t = g.vertex_count();
  for (Vertex x = 0; x < t; ++x)
    for (Vertex y = 0; y < t; ++y)
      for (Vertex a = 0; a < t; ++a)
        for (Vertex b = 0; b < t; ++b)
          if (g.multiplicity(x, a) > 0 && g.multiplicity(b, y) > 0) dim += n2[a][b] * n2[a][b];
  return dim;
}

}  // namespace

TEST(CommutantTest, FullMatrixAlgebraHasScalarCommutant) {
  const LocalAlgebra A(test::loops(2), Interval(0, 0));
  std::vector<BlockOperator> units;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) units.push_back(BlockOperator::matrix_unit(A, 0, 0, r, c));
  const auto basis = commutant(units, A);
  ASSERT_EQ(basis.size(), 1u);
  EXPECT_NEAR(span_residual(basis, BlockOperator::identity(A)), 0.0, 1e-12);
}

TEST(CommutantTest, TensorFactor) {
  const LocalAlgebra A(test::loops(2), Interval(0, 1));
  const auto basis = commutant(site_generators(A, Interval(1, 1)), A);
  ASSERT_EQ(basis.size(), 4u);
  for (const auto& u : site_generators(A, Interval(0, 0))) EXPECT_NEAR(span_residual(basis, u), 0.0, 1e-12);
}

TEST(CommutantTest, EmptyGeneratorsGiveEverything) {
  const LocalAlgebra A(test::fibonacci(), Interval(0, 1));
  EXPECT_EQ(commutant({}, A).size(), A.dimension());
}

TEST(CommutantTest, FibonacciBoundarySites) {
  const auto g = test::fibonacci();
  const LocalAlgebra A(g, Interval(0, 3));
  auto gens = site_generators(A, Interval(0, 0));
  for (auto& x : site_generators(A, Interval(3, 3))) gens.push_back(std::move(x));
  const auto basis = commutant(gens, A);
  EXPECT_EQ(basis.size(), boundary_commutant_dim(*g));
  EXPECT_EQ(basis.size(), 21u);
  // iota(A_[1,2]) sits inside
  for (const auto& u : site_generators(A, Interval(1, 2))) EXPECT_NEAR(span_residual(basis, u), 0.0, 1e-10);
}

TEST(CommutantTest, BoundarySitesOnOtherGraphs) {
  for (const CountMatrix& n : {CountMatrix{{1, 1}, {1, 0}}, CountMatrix{{1, 2}, {1, 1}}, CountMatrix{{2}}}) {
    const auto g = std::make_shared<const Graph>(Graph(n.size(), n));
    const LocalAlgebra A(g, Interval(0, 3));
    auto gens = site_generators(A, Interval(0, 0));
    for (auto& x : site_generators(A, Interval(3, 3))) gens.push_back(std::move(x));
    EXPECT_EQ(commutant(gens, A).size(), boundary_commutant_dim(*g));
  }
}

TEST(CommutantTest, OrthonormalAndCommuting) {
  const LocalAlgebra A(test::fibonacci(), Interval(0, 3));
  const auto gens = site_generators(A, Interval(0, 1));
  const auto basis = commutant(gens, A);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (const auto& g : gens) EXPECT_LE(commutator(basis[a], g).max_abs(), 1e-12);
    for (std::size_t b = 0; b < basis.size(); ++b)
      EXPECT_NEAR(std::abs(basis[a].hs_inner(basis[b]) - (a == b ? 1.0 : 0.0)), 0.0, 1e-12);
  }
}

TEST(CommutantTest, ClosedUnderAdjointAndProduct) {
  const LocalAlgebra A(test::fibonacci(), Interval(0, 3));
  auto gens = site_generators(A, Interval(0, 0));
  for (auto& x : site_generators(A, Interval(2, 3))) gens.push_back(std::move(x));
  const auto basis = commutant(gens, A);
  for (const auto& x : basis) {
    EXPECT_LE(span_residual(basis, x.adjoint()), 1e-10);
    for (const auto& y : basis) EXPECT_LE(span_residual(basis, x * y), 1e-10);
  }
}

TEST(CommutantTest, Bicommutant) {
  // single vertex: A_Lambda is a full matrix algebra, so the double commutant is the algebra itself
  const LocalAlgebra spin(test::loops(2), Interval(0, 2));
  const auto middle = site_generators(spin, Interval(1, 1));
  const auto twice = commutant(commutant(middle, spin), spin);
  EXPECT_EQ(twice.size(), 4u);
  for (const auto& u : middle) EXPECT_LE(span_residual(twice, u), 1e-10);

  // several vertices: it contains the generators (and the center of the ambient)
  const LocalAlgebra fib(test::fibonacci(), Interval(0, 3));
  const auto inner = site_generators(fib, Interval(1, 2));
  const auto again = commutant(commutant(inner, fib), fib);
  for (const auto& u : inner) EXPECT_LE(span_residual(again, u), 1e-10);
  EXPECT_EQ(again.size(), boundary_commutant_dim(fib.graph()));
}

TEST(CommutantTest, RandomUnitaryConjugationPreservesDimension) {
  // the solver does not rely on the generators being sparse 0/1 matrices
  std::mt19937_64 rng(17);
  const LocalAlgebra A(test::loops(2), Interval(0, 2));
  const auto h = random_operator(A, rng);
  const Matrix herm = h.block(0, 0) + h.block(0, 0).adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  BlockOperator u(A);
  u.block(0, 0) = es.eigenvectors();
  std::vector<BlockOperator> gens;
  for (const auto& g : site_generators(A, Interval(0, 1))) gens.push_back(u * g * u.adjoint());
  EXPECT_EQ(commutant(gens, A).size(), 4u);
}

TEST(LinalgTest, NullSpaceScaleReference) {
  Matrix m = Matrix::Zero(3, 2);
  m(0, 0) = 1e-17;
  EXPECT_EQ(linalg::null_space(m).cols(), 1);
  EXPECT_EQ(linalg::null_space(m, 1e-10, 1.0).cols(), 2);
  EXPECT_EQ(linalg::null_space(Matrix::Zero(2, 3)).cols(), 3);
  EXPECT_EQ(linalg::rank(Matrix::Identity(4, 4)), 4);
}
