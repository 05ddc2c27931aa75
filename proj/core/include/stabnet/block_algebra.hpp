#pragma once

// Local algebras of the path model: A_I = (+)_{i,j} B(H^I_{i,j}), optionally
// tensored with ancilla registers. A block (i, j) collects the paths of
// length |I| from vertex i to vertex j; its basis is (path) x (ancilla
// state), path index major, ancilla registers in mixed radix with the last
// register fastest.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stabnet/graph.hpp"
#include "stabnet/registers.hpp"

namespace stabnet {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Which algebra an operator lives in: graph, support interval, ancilla layout.
class LocalAlgebra {
 public:
  LocalAlgebra(std::shared_ptr<const Graph> graph, Interval support,
               std::optional<RegisterShape> ancilla = std::nullopt);

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  const Interval& support() const { return support_; }
  const std::optional<RegisterShape>& ancilla() const { return ancilla_; }
  std::size_t ancilla_dim() const { return ancilla_dim_; }
  std::size_t vertex_count() const { return graph_->vertex_count(); }
  std::size_t block_count() const { return vertex_count() * vertex_count(); }

  std::size_t path_count(Vertex i, Vertex j) const { return counts_[i][j]; }
  std::size_t block_dim(Vertex i, Vertex j) const { return counts_[i][j] * ancilla_dim_; }
  /// Linear dimension sum_{i,j} d_{ij}^2.
  std::size_t dimension() const;

  friend bool operator==(const LocalAlgebra& a, const LocalAlgebra& b);

 private:
  std::shared_ptr<const Graph> graph_;
  Interval support_;
  std::optional<RegisterShape> ancilla_;
  std::size_t ancilla_dim_ = 1;
  CountMatrix counts_;
};

class BlockOperator {
 public:
  /// The zero operator.
  explicit BlockOperator(LocalAlgebra algebra);

  static BlockOperator identity(const LocalAlgebra& algebra);
  static BlockOperator matrix_unit(const LocalAlgebra& algebra, Vertex i, Vertex j, std::size_t row,
                                   std::size_t col);
  /// Inverse of vectorize().
  static BlockOperator from_vector(const LocalAlgebra& algebra, const Vector& v);

  const LocalAlgebra& algebra() const { return algebra_; }
  Matrix& block(Vertex i, Vertex j) { return blocks_[i * algebra_.vertex_count() + j]; }
  const Matrix& block(Vertex i, Vertex j) const { return blocks_[i * algebra_.vertex_count() + j]; }
  Matrix& block(std::size_t id) { return blocks_[id]; }
  const Matrix& block(std::size_t id) const { return blocks_[id]; }

  BlockOperator adjoint() const;
  /// Blocks concatenated in (i, j) order, each column-major.
  Vector vectorize() const;

  BlockOperator& operator+=(const BlockOperator& other);
  BlockOperator& operator-=(const BlockOperator& other);
  BlockOperator& operator*=(cplx scalar);

  /// Hilbert-Schmidt inner product sum Tr(this^dagger other).
  cplx hs_inner(const BlockOperator& other) const;
  double norm() const;
  double max_abs() const;

 private:
  LocalAlgebra algebra_;
  std::vector<Matrix> blocks_;
  void require_same(const BlockOperator& other) const;
};

BlockOperator operator+(BlockOperator a, const BlockOperator& b);
BlockOperator operator-(BlockOperator a, const BlockOperator& b);
BlockOperator operator*(BlockOperator a, cplx s);
BlockOperator operator*(cplx s, BlockOperator a);
/// Blockwise product; throws ShapeMismatch unless both operands live in the same algebra.
BlockOperator operator*(const BlockOperator& a, const BlockOperator& b);
BlockOperator commutator(const BlockOperator& a, const BlockOperator& b);

/// Identity of A_I (tensored with the ancilla when present).
BlockOperator identity(std::shared_ptr<const Graph> g, Interval I,
                       std::optional<RegisterShape> ancilla = std::nullopt);

/// Placement of a smaller algebra inside a larger one.
///
/// For every target block, the target basis splits into groups; each group is
/// a copy of one source block, target[s] being the image of source index s.
struct Embedding {
  struct Group {
    std::size_t source_block = 0;
    std::vector<std::size_t> target;
  };
  std::vector<std::vector<Group>> groups;  // indexed by target block id
};

/// Throws ShapeMismatch when `from` is not a sub-algebra position of `to`.
Embedding embedding(const LocalAlgebra& from, const LocalAlgebra& to);

/// Target algebra for include(f, J) when no explicit ancilla layout is given: registers
/// on the new sites copy the dimension of the first existing register.
LocalAlgebra extended_algebra(const LocalAlgebra& from, Interval J);

/// Tensoring with the identity on J \ I, paths concatenated in lexicographic order.
BlockOperator include(const BlockOperator& f, const LocalAlgebra& target);
BlockOperator include(const BlockOperator& f, Interval J);

/// A 0/1 operator with at most one 1 per row and column, per block (row, col) pairs.
struct PartialPermutation {
  LocalAlgebra algebra;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> entries;
  BlockOperator dense() const;
};

/// Image of a matrix unit of `from` under the inclusion into `to`.
PartialPermutation include_unit(const Embedding& emb, const LocalAlgebra& to,
                                std::size_t source_block, std::size_t row, std::size_t col);

/// Perron-Frobenius data of the multiplicity matrix: u N = lambda u, N v = lambda v, u.v = 1.
struct TraceData {
  std::vector<double> left;
  std::vector<double> right;
  double eigenvalue = 0.0;
  double left_residual = 0.0;
  double right_residual = 0.0;
  /// True when u is not proportional to v (non-symmetric weighting).
  bool asymmetric = false;
};

TraceData compute_trace_data(const Graph& g);

/// tau_I(f) = lambda^{-|I|} sum_{ij} u_i v_j Tr f_{ij}, ancilla traced with the normalized trace.
cplx markov_trace(const BlockOperator& f, const TraceData& td);
/// Per-block weights w_{ij} with tau(f) = sum w_{ij} Tr f_{ij}.
std::vector<double> markov_weights(const LocalAlgebra& algebra, const TraceData& td);

/// Gaussian entries, deterministic for a given generator state.
BlockOperator random_operator(const LocalAlgebra& algebra, std::mt19937_64& rng);
/// Entries k/8 + i l/8 with integers |k|, |l| <= 8: products and sums of a few such
/// numbers are exact in double precision.
BlockOperator random_dyadic_operator(const LocalAlgebra& algebra, std::mt19937_64& rng);

}  // namespace stabnet
