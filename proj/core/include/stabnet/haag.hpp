#pragma once

// Commutants inside local algebras and the Haag-duality / net-axiom checks
// built on them.

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stabnet/block_algebra.hpp"

namespace stabnet {

/// Hilbert-Schmidt orthonormal basis of {x in ambient : [x, g] = 0 for every generator}.
///
/// Constraints decouple over blocks. Within a block, diagonal generators fix a
/// coloring of the matrix positions (x_pq may be nonzero only when p and q carry
/// the same diagonal values up to rel_cutoff); the remaining generators are imposed one at a
/// time, each reducing the current basis to the kernel of its constraint map.
/// Kernels use the singular-value cutoff rel_cutoff * sigma_max.
std::vector<BlockOperator> commutant(const std::vector<BlockOperator>& generators,
                                     const LocalAlgebra& ambient, double rel_cutoff = 1e-10);

/// Commutant of 0/1 partial permutations, computed exactly. Each equation of
/// x g = g x either identifies two entries of x or forces one to vanish, so the
/// commutant is spanned by the indicators of the surviving classes of positions.
/// Returned unnormalized; several entries of one class may share a row.
std::vector<PartialPermutation> unit_commutant(const std::vector<PartialPermutation>& generators,
                                               const LocalAlgebra& ambient);

/// Matrix units generating A_I as an algebra: all diagonal units plus the
/// adjacent off-diagonal units e_{p,p+1}, e_{p+1,p} of every block.
std::vector<PartialPermutation> interval_generators(const LocalAlgebra& algebra);

/// The same generators transported into `target` by the inclusion map.
std::vector<PartialPermutation> included_interval_generators(const LocalAlgebra& from,
                                                             const LocalAlgebra& target);

/// Sub-algebra of `ambient` on C, keeping the ambient registers whose site lies in C.
LocalAlgebra restricted_algebra(const LocalAlgebra& ambient, const Interval& C);

/// Finite set of sites, stored as sorted disjoint maximal intervals.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<long> sites);
  static SiteSet of(const Interval& I);

  const std::vector<Interval>& components() const { return components_; }
  bool empty() const { return components_.empty(); }
  std::size_t size() const;
  bool contains(long site) const;
  std::vector<long> sites() const;
  /// R-ball, clipped to `window`.
  SiteSet enlarged(long radius, const Interval& window) const;
  /// window minus this set.
  SiteSet complement_in(const Interval& window) const;
  std::string to_string() const;

 private:
  std::vector<Interval> components_;
};

/// Span of 0/1 partial permutations with pairwise disjoint supports, such as the
/// image of the matrix units of a subalgebra under inclusion.
class SparseUnitSpan {
 public:
  SparseUnitSpan(LocalAlgebra ambient, std::vector<PartialPermutation> units);

  /// Image of A_F in the ambient algebra; F may have several components, in which
  /// case the span is formed by products of included units, one per component.
  static SparseUnitSpan included_subalgebra(const SiteSet& F, const LocalAlgebra& ambient);

  /// The span multiplied by the center of the ambient algebra: every unit is cut
  /// into its pieces in the separate blocks.
  SparseUnitSpan times_center() const;

  std::size_t dimension() const { return units_.size(); }
  const std::vector<PartialPermutation>& units() const { return units_; }
  /// Hilbert-Schmidt distance from x to the span.
  double residual(const BlockOperator& x) const;
  /// Same for the normalized indicator of p's positions.
  double residual(const PartialPermutation& p) const;
  BlockOperator project(const BlockOperator& x) const;

 private:
  LocalAlgebra ambient_;
  std::vector<PartialPermutation> units_;
  // owner_[b](r, c) = index of the unit whose support contains (r, c), or -1
  std::vector<Eigen::MatrixXi> owner_;
};

struct HaagReport {
  std::size_t commutant_dim = 0;
  std::size_t subalgebra_dim = 0;
  /// max over the commutant basis of the distance to iota(A_F).
  double containment_residual = 0.0;
  /// Smallest R with the commutant inside iota(A_{F^{+R}}); nullopt if none up to |Lambda|.
  std::optional<long> minimal_radius;
  bool pass = false;
  std::vector<std::string> warnings;
};

/// Containment of a commutant basis in iota(A_{F^{+R}}) for growing R; fills every
/// field of the report except the warnings.
/// With modulo_center the comparison algebra is iota(A_{F^{+R}}) joined with Z(A_Lambda).
HaagReport containment_report(const std::vector<BlockOperator>& commutant_basis, const LocalAlgebra& ambient,
                              const SiteSet& F, double tol, long allowed_radius, bool modulo_center = false);
HaagReport containment_report(const std::vector<PartialPermutation>& commutant_basis, const LocalAlgebra& ambient,
                              const SiteSet& F, double tol, long allowed_radius, bool modulo_center = false);

/// Commutant of the image of A_{Lambda \ F} in A_Lambda compared with iota(A_F).
/// Passes when the commutant sits inside iota(A_{F^{+R}}) for some R <= allowed_radius;
/// at R = 0 the dimensions must also agree.
///
/// On a graph with several vertices the center of A_Lambda (the end-point labels of
/// the window) commutes with everything, so plain equality needs a single vertex.
/// modulo_center compares against iota(A_F) joined with that center instead.
HaagReport haag_check(std::shared_ptr<const Graph> g, const Interval& Lambda, const SiteSet& F,
                      std::optional<std::size_t> ancilla_dim, double tol, long allowed_radius = 0,
                      bool modulo_center = false);

/// An inclusion map f at I -> element of A_J, the J algebra carrying the same ancilla rule.
using InclusionMap = std::function<BlockOperator(const BlockOperator& f, const Interval& J)>;

struct AxiomResult {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct NetReport {
  std::vector<AxiomResult> axioms;
  bool pass = false;
};

/// Isotony, unitality, multiplicativity, *-preservation, injectivity and locality of
/// the net restricted to sub-intervals of [0, max_interval).
NetReport validate_net(std::shared_ptr<const Graph> g, std::size_t max_interval, std::mt19937_64& rng,
                       double tol = 1e-12, const InclusionMap& inclusion = {});

}  // namespace stabnet
