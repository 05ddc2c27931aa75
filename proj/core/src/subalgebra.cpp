#include "stabnet/subalgebra.hpp"

#include <algorithm>
#include <cmath>

#include "stabnet/errors.hpp"
#include "stabnet/linalg.hpp"

namespace stabnet {

namespace {

using Index = Eigen::Index;

Matrix stack(const std::vector<BlockOperator>& ops, const LocalAlgebra& alg) {
  Matrix m(static_cast<Index>(alg.dimension()), static_cast<Index>(ops.size()));
  for (std::size_t k = 0; k < ops.size(); ++k) m.col(static_cast<Index>(k)) = ops[k].vectorize();
  return m;
}

std::vector<BlockOperator> unstack(const Matrix& m, const LocalAlgebra& alg) {
  std::vector<BlockOperator> out;
  for (Index k = 0; k < m.cols(); ++k) out.push_back(BlockOperator::from_vector(alg, m.col(k)));
  return out;
}

Eigen::VectorXd entry_weights(const LocalAlgebra& alg, const TraceData& td) {
  const auto w = markov_weights(alg, td);
  Eigen::VectorXd out(static_cast<Index>(alg.dimension()));
  Index pos = 0;
  const std::size_t t = alg.vertex_count();
  for (std::size_t b = 0; b < t * t; ++b) {
    const auto d = static_cast<Index>(alg.block_dim(b / t, b % t));
    out.segment(pos, d * d).setConstant(w[b]);
    pos += d * d;
  }
  return out;
}

// Blockwise functional calculus on a Hermitian positive semidefinite operator.
BlockOperator inverse_sqrt(const BlockOperator& h, double cutoff) {
  BlockOperator out(h.algebra());
  for (std::size_t b = 0; b < h.algebra().block_count(); ++b)
    if (h.block(b).size() > 0) out.block(b) = linalg::inverse_sqrt_psd(h.block(b), cutoff);
  return out;
}

BlockOperator support(const BlockOperator& h, double cutoff) {
  BlockOperator out(h.algebra());
  for (std::size_t b = 0; b < h.algebra().block_count(); ++b)
    if (h.block(b).size() > 0) out.block(b) = linalg::support_projection(h.block(b), cutoff);
  return out;
}

double largest_eigenvalue(const BlockOperator& h) {
  double m = 0.0;
  for (std::size_t b = 0; b < h.algebra().block_count(); ++b)
    if (h.block(b).size() > 0) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(h.block(b), Eigen::EigenvaluesOnly);
      m = std::max(m, es.eigenvalues().maxCoeff());
    }
  return m;
}

std::vector<BlockOperator> matrix_units(const LocalAlgebra& alg) {
  std::vector<BlockOperator> out;
  const std::size_t t = alg.vertex_count();
  for (std::size_t b = 0; b < t * t; ++b) {
    const std::size_t d = alg.block_dim(b / t, b % t);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) out.push_back(BlockOperator::matrix_unit(alg, b / t, b % t, r, c));
  }
  return out;
}

}  // namespace

std::vector<BlockOperator> generated_algebra(const SubalgebraSpec& spec, double rel_cutoff) {
  const auto& alg = spec.ambient;
  std::vector<BlockOperator> letters;
  for (const auto& g : spec.generators) {
    if (!(g.algebra() == alg)) throw ShapeMismatch("generator does not live in the ambient algebra");
    letters.push_back(g);
    letters.push_back(g.adjoint());
  }
  std::vector<BlockOperator> seed = letters;
  seed.push_back(BlockOperator::identity(alg));
  Matrix basis = linalg::range(stack(seed, alg), rel_cutoff);
  for (;;) {
    std::vector<BlockOperator> words = unstack(basis, alg);
    const std::size_t current = words.size();
    for (const auto& l : letters)
      for (std::size_t k = 0; k < current; ++k) words.push_back(l * words[k]);
    Matrix grown = linalg::range(stack(words, alg), rel_cutoff);
    if (grown.cols() == basis.cols()) break;
    basis = std::move(grown);
  }
  return unstack(basis, alg);
}

BlockOperator ExpectationMap::apply(const BlockOperator& x) const {
  if (!(x.algebra() == ambient)) throw ShapeMismatch("operator does not live in the ambient algebra");
  return BlockOperator::from_vector(ambient, matrix * x.vectorize());
}

ExpectationMap conditional_expectation(const SubalgebraSpec& spec, const TraceData& td) {
  const Eigen::VectorXd w = entry_weights(spec.ambient, td);
  if (w.size() > 0 && w.minCoeff() <= 0.0) throw DomainError("trace degenerate: a Markov weight vanishes");
  ExpectationMap E{spec.ambient, Matrix(), generated_algebra(spec)};
  const Matrix B = stack(E.subalgebra_basis, spec.ambient);
  const Matrix BW = B.adjoint() * w.cast<cplx>().asDiagonal();
  const Matrix gram = BW * B;
  E.matrix = B * gram.llt().solve(BW);
  return E;
}

ExpectationResiduals check_expectation(const ExpectationMap& E, const TraceData& td, std::mt19937_64& rng,
                                       std::size_t samples) {
  ExpectationResiduals r;
  r.idempotent = (E.matrix * E.matrix - E.matrix).cwiseAbs().maxCoeff();
  const auto one = BlockOperator::identity(E.ambient);
  r.unital = (E.apply(one) - one).max_abs();
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_b = [&] {
    BlockOperator b(E.ambient);
    for (const auto& v : E.subalgebra_basis) b += v * cplx(normal(rng), normal(rng));
    return b;
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const auto x = random_operator(E.ambient, rng);
    const auto b1 = random_b();
    const auto b2 = random_b();
    r.bimodule = std::max(r.bimodule, (E.apply(b1 * x * b2) - b1 * E.apply(x) * b2).max_abs());
    r.trace = std::max(r.trace, std::abs(markov_trace(E.apply(x), td) - markov_trace(x, td)));
    const auto p = E.apply(x.adjoint() * x);
    for (std::size_t b = 0; b < E.ambient.block_count(); ++b) {
      if (p.block(b).size() == 0) continue;
      const Matrix herm = 0.5 * (p.block(b) + p.block(b).adjoint());
      Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
      r.positivity = std::max(r.positivity, -es.eigenvalues().minCoeff());
    }
  }
  return r;
}

double pp_reconstruction_residual(const std::vector<BlockOperator>& basis, const ExpectationMap& E,
                                  const std::vector<BlockOperator>& elements) {
  double worst = 0.0;
  for (const auto& a : elements) {
    BlockOperator rec(E.ambient);
    for (const auto& b : basis) rec += b * E.apply(b.adjoint() * a);
    worst = std::max(worst, (a - rec).norm());
  }
  return worst;
}

PimsnerPopaBasis pp_basis(const SubalgebraSpec& spec, const ExpectationMap& E, const TraceData& td, double tol) {
  const auto& alg = spec.ambient;
  constexpr double negligible = 1e-10;
  std::vector<BlockOperator> residuals;
  residuals.push_back(BlockOperator::identity(alg));
  for (auto& u : matrix_units(alg)) residuals.push_back(std::move(u));

  std::vector<BlockOperator> chosen;
  std::vector<BlockOperator> supports;
  for (std::size_t step = 0; step <= alg.dimension(); ++step) {
    double best_score = 0.0;
    std::size_t best = residuals.size();
    BlockOperator best_h(alg);
    for (std::size_t c = 0; c < residuals.size(); ++c) {
      if (residuals[c].norm() <= negligible) continue;
      const auto h = E.apply(residuals[c].adjoint() * residuals[c]);
      const double cutoff = negligible * std::max(1.0, largest_eigenvalue(h));
      const double score = markov_trace(support(h, cutoff), td).real();
      if (score > best_score + negligible) {
        best_score = score;
        best = c;
        best_h = h;
      }
    }
    if (best == residuals.size()) break;
    const double cutoff = negligible * std::max(1.0, largest_eigenvalue(best_h));
    BlockOperator b = residuals[best] * inverse_sqrt(best_h, cutoff);
    for (auto& y : residuals) y -= b * E.apply(b.adjoint() * y);
    supports.push_back(support(best_h, cutoff));
    chosen.push_back(std::move(b));
  }

  // b_i + b_j is again a basis element when the supports are orthogonal and E(b_i^dagger b_j) = 0
  for (std::size_t i = 0; i < chosen.size(); ++i)
    for (std::size_t j = i + 1; j < chosen.size();) {
      const double overlap = (supports[i] * supports[j]).max_abs();
      const double cross = E.apply(chosen[i].adjoint() * chosen[j]).max_abs();
      if (overlap <= negligible && cross <= negligible) {
        chosen[i] += chosen[j];
        supports[i] += supports[j];
        chosen.erase(chosen.begin() + static_cast<long>(j));
        supports.erase(supports.begin() + static_cast<long>(j));
      } else {
        ++j;
      }
    }

  PimsnerPopaBasis out{std::move(chosen), 0.0};
  out.residual = pp_reconstruction_residual(out.elements, E, matrix_units(alg));
  if (out.residual > tol)
    throw ToleranceError("Pimsner-Popa reconstruction residual " + std::to_string(out.residual) +
                         " exceeds tolerance");
  return out;
}

BlockOperator jones_projection(std::shared_ptr<const Graph> g, const TraceData& td, const Interval& I, long site) {
  if (!g->is_symmetric()) throw DomainError("Jones projections need a symmetric multiplicity matrix");
  const Interval window(site, site + 1);
  if (!I.contains(window)) throw DomainError("Jones projection window leaves the interval");
  const LocalAlgebra local(g, window);
  const PathTable table(*g, 2);
  const auto& mu = td.right;
  const double lambda = td.eigenvalue;
  BlockOperator e(local);
  for (Vertex a = 0; a < g->vertex_count(); ++a) {
    const auto& paths = table.paths(a, a);
    Vector v = Vector::Zero(static_cast<Index>(paths.size()));
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const auto& ed = paths[p].edges;
      if (ed[0].index == ed[1].index) v(static_cast<Index>(p)) = std::sqrt(mu[ed[0].target] / mu[a]);
    }
    e.block(a, a) = v * v.adjoint() / lambda;
  }
  return include(e, LocalAlgebra(std::move(g), I));
}

std::vector<BlockOperator> tl_generators(std::shared_ptr<const Graph> g, const TraceData& td, const Interval& I) {
  std::vector<BlockOperator> out;
  for (long s = I.lo; s < I.hi; ++s) out.push_back(jones_projection(g, td, I, s));
  return out;
}

std::vector<BlockOperator> tl_generators_outside(std::shared_ptr<const Graph> g, const TraceData& td,
                                                 const Interval& Lambda, const SiteSet& F) {
  std::vector<BlockOperator> out;
  for (long s = Lambda.lo; s < Lambda.hi; ++s)
    if (!F.contains(s) && !F.contains(s + 1)) out.push_back(jones_projection(g, td, Lambda, s));
  return out;
}

TLResiduals check_tl_relations(const std::vector<BlockOperator>& e, double lambda) {
  TLResiduals r;
  for (std::size_t i = 0; i < e.size(); ++i) {
    r.idempotent = std::max(r.idempotent, (e[i] * e[i] - e[i]).max_abs());
    r.selfadjoint = std::max(r.selfadjoint, (e[i].adjoint() - e[i]).max_abs());
    for (std::size_t j = 0; j < e.size(); ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap == 1)
        r.braid = std::max(r.braid, (e[i] * e[j] * e[i] - e[i] * cplx(1.0 / (lambda * lambda))).max_abs());
      else if (gap >= 2)
        r.commuting = std::max(r.commuting, commutator(e[i], e[j]).max_abs());
    }
  }
  return r;
}

HaagReport relative_haag_check(const LocalAlgebra& ambient, const std::vector<BlockOperator>& generators,
                               const SiteSet& F, double tol, long allowed_radius) {
  for (long s : F.sites())
    if (!ambient.support().contains(s)) throw DomainError("subset " + F.to_string() + " is not contained in Lambda");
  const auto basis = generators.empty() ? matrix_units(ambient) : commutant(generators, ambient);
  HaagReport rep = containment_report(basis, ambient, F, tol, allowed_radius);
  if (generators.empty())
    rep.warnings.push_back("no subalgebra generators outside the subset: commutant is the whole ambient algebra");
  return rep;
}

}  // namespace stabnet
