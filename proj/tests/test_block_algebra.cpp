#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stabnet/block_algebra.hpp"
#include "stabnet/errors.hpp"
#include "support.hpp"

using namespace stabnet;

namespace {

// include(f, J) rebuilt from path enumeration: a target path splits into
// (left, middle, right) and the image entry is f(middle, middle') when the
// outer segments agree.
BlockOperator include_oracle(const BlockOperator& f, const Interval& J) {
  const Graph& g = f.algebra().graph();
  const Interval I = f.algebra().support();
  const std::size_t nl = static_cast<std::size_t>(I.lo - J.lo), nm = I.length();
  const std::size_t t = g.vertex_count();
  const LocalAlgebra target(f.algebra().graph_ptr(), J);
  BlockOperator out(target);
  for (Vertex a = 0; a < t; ++a)
    for (Vertex b = 0; b < t; ++b) {
      const auto paths = enumerate_paths(g, J.length(), a, b);
      for (std::size_t r = 0; r < paths.size(); ++r)
        for (std::size_t c = 0; c < paths.size(); ++c) {
          const auto& p = paths[r].edges;
          const auto& q = paths[c].edges;
          bool same_outside = true;
          for (std::size_t s = 0; s < p.size(); ++s)
            if (s < nl || s >= nl + nm) same_outside = same_outside && p[s] == q[s];
          if (!same_outside) continue;
          const Vertex i = nl == 0 ? a : p[nl - 1].target;
          const Vertex j = p[nl + nm - 1].target;
          if (i != (nl == 0 ? a : q[nl - 1].target) || j != q[nl + nm - 1].target) continue;
          const auto mids = enumerate_paths(g, nm, i, j);
          std::size_t mr = 0, mc = 0;
          for (std::size_t m = 0; m < mids.size(); ++m) {
            if (std::equal(mids[m].edges.begin(), mids[m].edges.end(), p.begin() + nl)) mr = m;
            if (std::equal(mids[m].edges.begin(), mids[m].edges.end(), q.begin() + nl)) mc = m;
          }
          out.block(a, b)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              f.block(i, j)(static_cast<Eigen::Index>(mr), static_cast<Eigen::Index>(mc));
        }
    }
  return out;
}

std::shared_ptr<const Graph> three_vertex() {
  return std::make_shared<const Graph>(Graph(3, {{1, 1, 0}, {0, 1, 2}, {1, 0, 1}}));
}

}  // namespace

TEST(LocalAlgebraTest, IdentityBlockSizes) {
  const auto fib = test::fibonacci();
  const auto one = identity(fib, Interval(0, 1));
  EXPECT_EQ(one.block(0, 0).rows(), 1);
  EXPECT_EQ(one.block(0, 1).rows(), 1);
  EXPECT_EQ(one.block(1, 0).rows(), 1);
  EXPECT_EQ(one.block(1, 1).rows(), 2);
  EXPECT_TRUE(one.block(1, 1).isIdentity());
  EXPECT_EQ(one.algebra().dimension(), 7u);

  const auto loop = identity(test::graph_file("single_loop"), Interval(0, 2));
  EXPECT_EQ(loop.block(0, 0), Matrix::Identity(1, 1));

  const LocalAlgebra stabilized(fib, Interval(3, 3), RegisterShape::uniform(3, 3, 2));
  for (Vertex i = 0; i < 2; ++i)
    for (Vertex j = 0; j < 2; ++j) EXPECT_EQ(stabilized.block_dim(i, j), fib->multiplicity(i, j) * 2);
}

TEST(IncludeTest, TwoLoopKronecker) {
  const auto g = test::loops(2);
  std::mt19937_64 rng(3);
  const auto f0 = random_operator(LocalAlgebra(g, Interval(0, 0)), rng);
  const auto f1 = random_operator(LocalAlgebra(g, Interval(1, 1)), rng);
  const Matrix one = Matrix::Identity(2, 2);
  Matrix right_extended(4, 4), left_extended(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      right_extended.block(2 * a, 2 * b, 2, 2) = f0.block(0, 0)(a, b) * one;
      left_extended.block(2 * a, 2 * b, 2, 2) = one(a, b) * f1.block(0, 0);
    }
  EXPECT_EQ(include(f0, Interval(0, 1)).block(0, 0), right_extended);
  EXPECT_EQ(include(f1, Interval(0, 1)).block(0, 0), left_extended);
}

TEST(IncludeTest, MatchesPathSplittingOracle) {
  std::mt19937_64 rng(8);
  for (const auto& g : {test::fibonacci(), three_vertex()})
    for (long lo = 0; lo <= 2; ++lo)
      for (long hi = lo; hi <= 2; ++hi) {
        const auto f = random_dyadic_operator(LocalAlgebra(g, Interval(lo, hi)), rng);
        const Interval J(0, 3);
        EXPECT_EQ((include(f, J) - include_oracle(f, J)).max_abs(), 0.0) << lo << " " << hi;
      }
}

TEST(IncludeTest, UnitalStarHomomorphismExactly) {
  std::mt19937_64 rng(21);
  for (const auto& g : {test::fibonacci(), three_vertex(), test::loops(2)}) {
    const LocalAlgebra A(g, Interval(1, 2));
    for (const Interval J : {Interval(0, 2), Interval(1, 4), Interval(0, 4)}) {
      EXPECT_EQ((include(BlockOperator::identity(A), J) - identity(g, J)).max_abs(), 0.0);
      for (int s = 0; s < 5; ++s) {
        const auto f = random_dyadic_operator(A, rng);
        const auto h = random_dyadic_operator(A, rng);
        EXPECT_EQ((include(f * h, J) - include(f, J) * include(h, J)).max_abs(), 0.0);
        EXPECT_EQ((include(f.adjoint(), J) - include(f, J).adjoint()).max_abs(), 0.0);
        if (J.contains(Interval(1, 3)))
          EXPECT_EQ((include(include(f, Interval(1, 3)), J) - include(f, J)).max_abs(), 0.0);
      }
    }
  }
}

TEST(IncludeTest, AncillaTensorsIdentity) {
  const auto g = test::fibonacci();
  std::mt19937_64 rng(4);
  const LocalAlgebra A(g, Interval(1, 1), RegisterShape::uniform(1, 1, 2));
  const LocalAlgebra B(g, Interval(0, 2), RegisterShape::uniform(0, 2, 2));
  const auto f = random_dyadic_operator(A, rng);
  const auto h = random_dyadic_operator(A, rng);
  EXPECT_EQ((include(f * h, B) - include(f, B) * include(h, B)).max_abs(), 0.0);
  EXPECT_EQ((include(BlockOperator::identity(A), B) - BlockOperator::identity(B)).max_abs(), 0.0);
  const TraceData td = compute_trace_data(*g);
  EXPECT_NEAR(std::abs(markov_trace(include(f, B), td) - markov_trace(f, td)), 0.0, 1e-12);
}

TEST(IncludeTest, ShapeErrors) {
  const auto g = test::fibonacci();
  const BlockOperator f(LocalAlgebra(g, Interval(1, 2)));
  EXPECT_THROW(include(f, Interval(2, 4)), ShapeMismatch);
  const BlockOperator h(LocalAlgebra(g, Interval(0, 1)));
  EXPECT_THROW(f * h, ShapeMismatch);
  EXPECT_THROW(f + h, ShapeMismatch);
  EXPECT_THROW(BlockOperator::matrix_unit(f.algebra(), 0, 0, 3, 0), DomainError);
}

TEST(TraceDataTest, FibonacciPerronFrobenius) {
  const auto td = compute_trace_data(*test::fibonacci());
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  EXPECT_NEAR(td.eigenvalue, phi, 1e-12);
  EXPECT_NEAR(td.left[1] / td.left[0], phi, 1e-12);
  EXPECT_NEAR(td.left[0] * td.right[0] + td.left[1] * td.right[1], 1.0, 1e-12);
  EXPECT_LE(td.left_residual, 1e-12);
  EXPECT_LE(td.right_residual, 1e-12);
  EXPECT_FALSE(td.asymmetric);
  EXPECT_TRUE(compute_trace_data(*three_vertex()).asymmetric);
}

TEST(MarkovTraceTest, NormalizedAndTracial) {
  std::mt19937_64 rng(13);
  for (const auto& g : {test::fibonacci(), three_vertex()}) {
    const auto td = compute_trace_data(*g);
    for (long len = 1; len <= 4; ++len) {
      const LocalAlgebra A(g, Interval(0, len - 1));
      EXPECT_NEAR(std::abs(markov_trace(BlockOperator::identity(A), td) - 1.0), 0.0, 1e-12);
      const auto a = random_operator(A, rng);
      const auto b = random_operator(A, rng);
      EXPECT_NEAR(std::abs(markov_trace(a * b, td) - markov_trace(b * a, td)), 0.0, 1e-12);
    }
  }
}

// tau_J o include = tau_I for nested intervals on random graphs with up to three vertices.
TEST(MarkovTraceTest, CompatibleWithInclusion) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> mult(0, 2);
  int graphs = 0;
  while (graphs < 8) {
    const std::size_t t = 1 + static_cast<std::size_t>(graphs % 3);
    CountMatrix n(t, std::vector<std::uint64_t>(t));
    for (auto& row : n)
      for (auto& x : row) x = static_cast<std::uint64_t>(mult(rng));
    std::shared_ptr<const Graph> g;
    try {
      g = std::make_shared<const Graph>(Graph(t, n));
      uniform_reach(*g);
    } catch (const Error&) {
      continue;
    }
    ++graphs;
    const auto td = compute_trace_data(*g);
    for (int s = 0; s < 12; ++s) {
      const long lo = s % 3, hi = lo + s % 2;
      const auto f = random_operator(LocalAlgebra(g, Interval(lo, hi)), rng);
      const Interval J(0, 4);
      EXPECT_NEAR(std::abs(markov_trace(include(f, J), td) - markov_trace(f, td)), 0.0, 1e-12);
    }
  }
}

TEST(BlockOperatorTest, VectorizeRoundTripAndInnerProduct) {
  std::mt19937_64 rng(2);
  const LocalAlgebra A(test::fibonacci(), Interval(0, 2));
  const auto a = random_operator(A, rng);
  const auto b = random_operator(A, rng);
  EXPECT_EQ((BlockOperator::from_vector(A, a.vectorize()) - a).max_abs(), 0.0);
  EXPECT_NEAR(std::abs(a.hs_inner(b) - a.vectorize().dot(b.vectorize())), 0.0, 1e-12);
  EXPECT_NEAR(a.norm(), a.vectorize().norm(), 1e-12);
  EXPECT_EQ(static_cast<std::size_t>(a.vectorize().size()), A.dimension());
}
