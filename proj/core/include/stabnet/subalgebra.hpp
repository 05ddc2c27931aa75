#pragma once

// Unital *-subalgebras B of a local algebra A: the trace-orthogonal
// conditional expectation, Pimsner-Popa bases, Jones projections and the
// relative Haag-duality check.

#include <vector>

#include "stabnet/block_algebra.hpp"
#include "stabnet/haag.hpp"

namespace stabnet {

struct SubalgebraSpec {
  LocalAlgebra ambient;
  std::vector<BlockOperator> generators;
};

/// Hilbert-Schmidt orthonormal basis of the unital *-algebra generated by the spec.
std::vector<BlockOperator> generated_algebra(const SubalgebraSpec& spec, double rel_cutoff = 1e-10);

/// E on the vectorized ambient algebra: x -> B (B^H W B)^{-1} B^H W x, with B a basis of the
/// subalgebra and W the Markov weights, i.e. the projection orthogonal for <x, y> = tau(x^dagger y).
struct ExpectationMap {
  LocalAlgebra ambient;
  Matrix matrix;
  std::vector<BlockOperator> subalgebra_basis;

  BlockOperator apply(const BlockOperator& x) const;
};

/// Throws DomainError when some Markov weight vanishes (degenerate trace).
ExpectationMap conditional_expectation(const SubalgebraSpec& spec, const TraceData& td);

struct ExpectationResiduals {
  double idempotent = 0.0;    ///< ||E^2 - E||
  double unital = 0.0;        ///< ||E(1) - 1||
  double bimodule = 0.0;      ///< max ||E(b1 x b2) - b1 E(x) b2|| over samples
  double trace = 0.0;         ///< max |tau(E x) - tau(x)|
  double positivity = 0.0;    ///< max(0, -lowest eigenvalue of E(x^dagger x))
};

ExpectationResiduals check_expectation(const ExpectationMap& E, const TraceData& td, std::mt19937_64& rng,
                                       std::size_t samples = 20);

struct PimsnerPopaBasis {
  std::vector<BlockOperator> elements;
  /// max ||a - sum_i b_i E(b_i^dagger a)|| over the matrix units of the ambient.
  double residual = 0.0;
};

/// Greedy Hilbert-module Gram-Schmidt over the candidates {1} and the matrix units,
/// taking at each step the candidate whose residual has the largest support trace,
/// followed by merging elements with orthogonal supports. Throws ToleranceError when
/// the reconstruction misses `tol`.
PimsnerPopaBasis pp_basis(const SubalgebraSpec& spec, const ExpectationMap& E, const TraceData& td,
                          double tol = 1e-8);

/// max ||a - sum_i b_i E(b_i^dagger a)|| over the given elements.
double pp_reconstruction_residual(const std::vector<BlockOperator>& basis, const ExpectationMap& E,
                                  const std::vector<BlockOperator>& elements);

/// Jones projection on sites (site, site + 1) of I: in block (a, a) it is the rank-one
/// projection onto v_a / sqrt(lambda), v_a = sum over edges a -> m (index q) of
/// sqrt(mu_m / mu_a) |a -q-> m -q-> a>, where the return step uses the parallel edge
/// with the same index. Requires a symmetric multiplicity matrix.
BlockOperator jones_projection(std::shared_ptr<const Graph> g, const TraceData& td, const Interval& I, long site);

/// e_lo, ..., e_{hi-1} on I.
std::vector<BlockOperator> tl_generators(std::shared_ptr<const Graph> g, const TraceData& td, const Interval& I);

/// Jones projections of Lambda whose 2-site window avoids F.
std::vector<BlockOperator> tl_generators_outside(std::shared_ptr<const Graph> g, const TraceData& td,
                                                 const Interval& Lambda, const SiteSet& F);

struct TLResiduals {
  double idempotent = 0.0;
  double selfadjoint = 0.0;
  double braid = 0.0;      ///< e_i e_{i+-1} e_i = lambda^{-2} e_i
  double commuting = 0.0;  ///< [e_i, e_j] = 0 for |i - j| >= 2
};

TLResiduals check_tl_relations(const std::vector<BlockOperator>& e, double lambda);

/// {a in A_Lambda : [a, b] = 0 for b in generators} compared with iota(A_{F^{+R}}).
/// With no generators the commutant is all of A_Lambda and a warning is recorded.
HaagReport relative_haag_check(const LocalAlgebra& ambient, const std::vector<BlockOperator>& generators,
                               const SiteSet& F, double tol, long allowed_radius);

}  // namespace stabnet
