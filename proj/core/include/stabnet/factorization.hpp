#pragma once

// Truncated stabilization: path algebras tensored with finite ancilla
// registers, the interleaving bijections Phi and Psi, their composite Lambda,
// the conjugation map alpha and spread certificates.
//
// Conventions. A family is built on sites 0..L-1 with L = 2kn, split into n
// blocks of 2k sites. The codomain of Lambda for boundary pair (i, j) is a
// tuple c of register values, one per site, obtained from the ancilla values
// n_s by
//   c[2kb]     = l_b * n[2kb] + p_b          (Phi on block b, p_b the rank of the
//                                             block's path segment among the l_b
//                                             paths between its end vertices)
//   c[2kb - k] = t * c[2kb - k] + v_b        (Psi at the b-th block boundary, b >= 1)
// All other registers pass through. At finite D the image is a ragged subset S
// of the bounding box; S is stored sorted and indexes the codomain basis.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "stabnet/block_algebra.hpp"
#include "stabnet/haag.hpp"

namespace stabnet {

/// Exact permutation between two enumerated bases, stored as index maps.
struct BasisBijection {
  std::vector<std::size_t> domain_dims;    ///< mixed radix of the domain, first factor slowest
  std::vector<std::size_t> codomain_dims;  ///< bounding dims of the codomain
  std::vector<std::size_t> forward;
  std::vector<std::size_t> inverse;

  std::size_t domain_dim() const { return forward.size(); }
  std::size_t codomain_dim() const { return inverse.size(); }
  /// forward and inverse are mutually inverse maps between equal-size ranges.
  bool is_bijection() const;
};

/// |p, n1, rest> -> |l n1 + p, rest>; regs.registers[0] is n1 (dimension D).
BasisBijection phi(std::size_t l, const RegisterShape& regs);
/// |j, n1, rest> -> |t n1 + j, rest>.
BasisBijection psi(std::size_t t, const RegisterShape& regs);
/// Psi when branch j carries its own first-register dimension branch_dims[j]: the
/// pairs (j, n1) are enumerated by n1, then j, skipping exhausted branches. Reduces to
/// psi() when all branch dimensions agree. Domain is branch-major.
BasisBijection psi_ragged(const std::vector<std::size_t>& branch_dims, const std::vector<std::size_t>& rest);

/// Lambda for one boundary pair.
struct LambdaBlock {
  Vertex i = 0;
  Vertex j = 0;
  std::size_t path_count = 0;
  std::size_t register_count = 0;
  /// Bounding dims of the codomain registers, one register per site.
  RegisterShape codomain_shape;
  /// Codomain tuples, sorted lexicographically, register_count values each.
  std::vector<std::uint32_t> tuples;
  /// Domain index (path index major, ancilla mixed radix) <-> position in `tuples`.
  BasisBijection bijection;

  std::size_t size() const { return bijection.codomain_dim(); }
  const std::uint32_t* tuple(std::size_t pos) const { return tuples.data() + pos * register_count; }
  /// Position of a tuple in the codomain, nullopt when it lies outside the image.
  std::optional<std::size_t> find(const std::uint32_t* tuple) const;

  // mixed-radix key over codomain_shape
  std::unordered_map<std::uint64_t, std::size_t> position_;
  std::uint64_t key(const std::uint32_t* tuple) const;
};

/// Throws DomainError when 2k is below the uniform reach of g, n < 2, or D = 0.
LambdaBlock build_lambda(const Graph& g, Vertex i, Vertex j, std::size_t n_blocks, std::size_t half_block,
                         std::size_t D);

/// Lambda for every boundary pair of a graph, sharing (n, k, D).
class LambdaFamily {
 public:
  LambdaFamily(std::shared_ptr<const Graph> g, std::size_t n_blocks, std::size_t half_block, std::size_t D);

  const Graph& graph() const { return *graph_; }
  std::size_t n_blocks() const { return n_; }
  std::size_t half_block() const { return k_; }
  std::size_t ancilla_dim() const { return D_; }
  std::size_t site_count() const { return 2 * k_ * n_; }
  /// All sites [0, L-1].
  Interval whole() const;
  /// The middle (n-1)2k sites [k, L-k-1].
  Interval middle() const;
  const LambdaBlock& block(Vertex i, Vertex j) const { return blocks_[i * graph_->vertex_count() + j]; }
  /// Per-site bounding dims over all boundary pairs.
  const RegisterShape& codomain_shape() const { return shape_; }
  /// Stabilized algebra on whole(): D-dimensional register on every site.
  LocalAlgebra domain_algebra() const;

 private:
  std::shared_ptr<const Graph> graph_;
  std::size_t n_, k_, D_;
  std::vector<LambdaBlock> blocks_;
  RegisterShape shape_;
};

/// Operators on codomain registers are BlockOperators over the one-vertex,
/// one-loop graph whose ancilla shape lists the registers acted on.
LocalAlgebra register_algebra(const std::vector<Register>& registers);

/// Partition of the joint values of some codomain registers into atoms: every
/// fiber of every listed family (values of those registers compatible with fixed
/// values elsewhere) is a union of atoms. Operators that are block diagonal over
/// the atoms keep the truncated codomain invariant.
struct SectorDecomposition {
  std::vector<Register> registers;
  std::vector<std::vector<std::size_t>> atoms;
};

SectorDecomposition admissible_sectors(const std::vector<const LambdaFamily*>& families,
                                       const std::vector<long>& sites);

/// Random operator block diagonal over the atoms; dyadic entries when `dyadic`.
BlockOperator random_admissible_operator(const SectorDecomposition& sectors, std::mt19937_64& rng,
                                         bool dyadic = true);

/// Sparse counterpart of BlockOperator for large stabilized blocks.
struct SparseBlockOperator {
  using Sparse = Eigen::SparseMatrix<cplx>;
  LocalAlgebra algebra;
  std::vector<Sparse> blocks;

  explicit SparseBlockOperator(LocalAlgebra alg);
  static SparseBlockOperator from_dense(const BlockOperator& x);
  BlockOperator dense() const;
  SparseBlockOperator adjoint() const;
  double max_abs() const;
};

SparseBlockOperator operator*(const SparseBlockOperator& a, const SparseBlockOperator& b);
SparseBlockOperator operator-(const SparseBlockOperator& a, const SparseBlockOperator& b);

/// alpha(a) = (+)_{ij} Lambda_ij^dagger (1 (x) a (x) 1) Lambda_ij. Throws ShapeMismatch when a
/// acts outside the middle interval, its register dims differ from the family's, or it
/// maps some codomain tuple outside the truncated image.
SparseBlockOperator alpha_sparse(const BlockOperator& a, const LambdaFamily& family);
BlockOperator alpha(const BlockOperator& a, const LambdaFamily& family);

struct SpreadReport {
  /// Smallest R' such that the operator commutes with every generator outside support^{+R'}.
  long radius = 0;
  /// Largest commutator against generators outside support^{+bound}.
  double residual = 0.0;
  /// Generator attaining the largest commutator at the last failing radius (empty if none failed).
  std::string witness;
  bool pass = false;
};

/// Caches included interval generators of a stabilized ambient algebra.
class SpreadContext {
 public:
  explicit SpreadContext(LocalAlgebra ambient);
  const LocalAlgebra& ambient() const { return ambient_; }
  struct Generator {
    std::string label;
    PartialPermutation unit;
  };
  const std::vector<Generator>& generators_outside(const SiteSet& inside);

 private:
  LocalAlgebra ambient_;
  std::vector<std::pair<std::vector<long>, std::vector<Generator>>> cache_;
};

SpreadReport spread_certificate(SpreadContext& ctx, const SparseBlockOperator& x, const Interval& support,
                                long bound, double tol);
SpreadReport spread_certificate(const BlockOperator& x, const Interval& support, long bound, double tol);

/// phi (x) |xi>^{(x) sites}: a state on the path algebra given by density blocks, and
/// one unit vector used on every ancilla register.
struct StabilizedState {
  LocalAlgebra base;             ///< path algebra without ancilla
  std::vector<Matrix> density;   ///< one positive block per (i, j), total trace 1
  Vector xi;

  /// Markov trace as the base state.
  static StabilizedState from_trace(const LocalAlgebra& base, const TraceData& td, Vector xi);
};

/// Throws DomainError for an unnormalized xi and ShapeMismatch when f does not match.
cplx stabilized_state_eval(const StabilizedState& s, const BlockOperator& f);

}  // namespace stabnet
