#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "stabnet/errors.hpp"
#include "stabnet/haag.hpp"
#include "stabnet/linalg.hpp"

namespace stabnet {

namespace {

using Index = Eigen::Index;

std::optional<RegisterShape> restrict_ancilla(const LocalAlgebra& ambient, const Interval& C) {
  if (!ambient.ancilla()) return std::nullopt;
  std::vector<Register> regs;
  for (const auto& r : ambient.ancilla()->registers)
    if (C.contains(r.site)) regs.push_back(r);
  return RegisterShape(std::move(regs));
}


// Blockwise composition of two partial permutations.
PartialPermutation compose(const PartialPermutation& a, const PartialPermutation& b) {
  PartialPermutation out{a.algebra, std::vector<std::vector<std::pair<std::size_t, std::size_t>>>(a.entries.size())};
  for (std::size_t blk = 0; blk < a.entries.size(); ++blk) {
    if (a.entries[blk].empty() || b.entries[blk].empty()) continue;
    std::unordered_map<std::size_t, std::size_t> next;
    for (auto [r, c] : b.entries[blk]) next.emplace(r, c);
    for (auto [r, c] : a.entries[blk]) {
      auto it = next.find(c);
      if (it != next.end()) out.entries[blk].emplace_back(r, it->second);
    }
  }
  return out;
}

bool is_zero(const PartialPermutation& p) {
  for (const auto& e : p.entries)
    if (!e.empty()) return false;
  return true;
}

}  // namespace

LocalAlgebra restricted_algebra(const LocalAlgebra& ambient, const Interval& C) {
  return LocalAlgebra(ambient.graph_ptr(), C, restrict_ancilla(ambient, C));
}

SiteSet::SiteSet(std::vector<long> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  for (long s : sites) {
    if (!components_.empty() && components_.back().hi + 1 == s)
      components_.back().hi = s;
    else
      components_.emplace_back(s, s);
  }
}

SiteSet SiteSet::of(const Interval& I) {
  SiteSet s;
  s.components_.push_back(I);
  return s;
}

std::size_t SiteSet::size() const {
  std::size_t n = 0;
  for (const auto& c : components_) n += c.length();
  return n;
}

bool SiteSet::contains(long site) const {
  return std::any_of(components_.begin(), components_.end(), [&](const Interval& c) { return c.contains(site); });
}

std::vector<long> SiteSet::sites() const {
  std::vector<long> out;
  for (const auto& c : components_)
    for (long s = c.lo; s <= c.hi; ++s) out.push_back(s);
  return out;
}

SiteSet SiteSet::enlarged(long radius, const Interval& window) const {
  std::vector<long> out;
  for (const auto& c : components_)
    for (long s = std::max(c.lo - radius, window.lo); s <= std::min(c.hi + radius, window.hi); ++s) out.push_back(s);
  return SiteSet(std::move(out));
}

SiteSet SiteSet::complement_in(const Interval& window) const {
  std::vector<long> out;
  for (long s = window.lo; s <= window.hi; ++s)
    if (!contains(s)) out.push_back(s);
  return SiteSet(std::move(out));
}

std::string SiteSet::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (long s : sites()) {
    if (!first) os << ',';
    os << s;
    first = false;
  }
  os << '}';
  return os.str();
}

SparseUnitSpan::SparseUnitSpan(LocalAlgebra ambient, std::vector<PartialPermutation> units)
    : ambient_(std::move(ambient)), units_(std::move(units)) {
  const std::size_t t = ambient_.vertex_count();
  for (std::size_t b = 0; b < t * t; ++b) {
    const auto d = static_cast<Index>(ambient_.block_dim(b / t, b % t));
    owner_.push_back(Eigen::MatrixXi::Constant(d, d, -1));
  }
  for (std::size_t s = 0; s < units_.size(); ++s)
    for (std::size_t b = 0; b < units_[s].entries.size(); ++b)
      for (auto [r, c] : units_[s].entries[b]) {
        int& slot = owner_[b](static_cast<Index>(r), static_cast<Index>(c));
        if (slot >= 0) throw DomainError("unit span requires disjoint supports");
        slot = static_cast<int>(s);
      }
}

SparseUnitSpan SparseUnitSpan::included_subalgebra(const SiteSet& F, const LocalAlgebra& ambient) {
  const std::size_t t = ambient.vertex_count();
  std::vector<PartialPermutation> current;
  {
    PartialPermutation one{ambient, std::vector<std::vector<std::pair<std::size_t, std::size_t>>>(t * t)};
    for (std::size_t b = 0; b < t * t; ++b)
      for (std::size_t p = 0; p < ambient.block_dim(b / t, b % t); ++p) one.entries[b].emplace_back(p, p);
    current.push_back(std::move(one));
  }
  for (const auto& C : F.components()) {
    if (!ambient.support().contains(C)) throw DomainError("subset is not contained in the ambient interval");
    const LocalAlgebra local = restricted_algebra(ambient, C);
    const Embedding emb = embedding(local, ambient);
    std::vector<PartialPermutation> units;
    for (std::size_t b = 0; b < t * t; ++b) {
      const std::size_t d = local.block_dim(b / t, b % t);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) units.push_back(include_unit(emb, ambient, b, r, c));
    }
    std::vector<PartialPermutation> next;
    for (const auto& a : current)
      for (const auto& u : units) {
        auto p = compose(a, u);
        if (!is_zero(p)) next.push_back(std::move(p));
      }
    current = std::move(next);
  }
  return SparseUnitSpan(ambient, std::move(current));
}

BlockOperator SparseUnitSpan::project(const BlockOperator& x) const {
  BlockOperator out(ambient_);
  for (const auto& u : units_) {
    cplx sum = 0.0;
    std::size_t n = 0;
    for (std::size_t b = 0; b < u.entries.size(); ++b)
      for (auto [r, c] : u.entries[b]) {
        sum += x.block(b)(static_cast<Index>(r), static_cast<Index>(c));
        ++n;
      }
    const cplx coef = sum / static_cast<double>(n);
    for (std::size_t b = 0; b < u.entries.size(); ++b)
      for (auto [r, c] : u.entries[b]) out.block(b)(static_cast<Index>(r), static_cast<Index>(c)) = coef;
  }
  return out;
}

double SparseUnitSpan::residual(const BlockOperator& x) const {
  if (!(x.algebra() == ambient_)) throw ShapeMismatch("operator does not live in the span's ambient algebra");
  return (x - project(x)).norm();
}

SparseUnitSpan SparseUnitSpan::times_center() const {
  std::vector<PartialPermutation> pieces;
  for (const auto& u : units_)
    for (std::size_t b = 0; b < u.entries.size(); ++b) {
      if (u.entries[b].empty()) continue;
      PartialPermutation p{ambient_, std::vector<std::vector<std::pair<std::size_t, std::size_t>>>(u.entries.size())};
      p.entries[b] = u.entries[b];
      pieces.push_back(std::move(p));
    }
  return SparseUnitSpan(ambient_, std::move(pieces));
}

double SparseUnitSpan::residual(const PartialPermutation& p) const {
  if (!(p.algebra == ambient_)) throw ShapeMismatch("operator does not live in the span's ambient algebra");
  // |P - proj P|^2 = |P| - sum_u overlap_u^2 / |u| for the 0/1 indicator P
  std::unordered_map<int, std::size_t> overlap;
  std::size_t size = 0;
  for (std::size_t b = 0; b < p.entries.size(); ++b)
    for (auto [r, c] : p.entries[b]) {
      ++size;
      const int u = owner_[b](static_cast<Index>(r), static_cast<Index>(c));
      if (u >= 0) ++overlap[u];
    }
  if (size == 0) return 0.0;
  double kept = 0.0;
  for (auto [u, k] : overlap) {
    std::size_t n = 0;
    for (const auto& e : units_[static_cast<std::size_t>(u)].entries) n += e.size();
    kept += static_cast<double>(k) * static_cast<double>(k) / static_cast<double>(n);
  }
  return std::sqrt(std::max(0.0, 1.0 - kept / static_cast<double>(size)));
}

namespace {

HaagReport containment_search(std::size_t commutant_dim,
                              const std::function<double(const SparseUnitSpan&)>& max_residual,
                              const LocalAlgebra& ambient, const SiteSet& F, double tol, long allowed_radius,
                              bool modulo_center) {
  auto span_of = [&](const SiteSet& S) {
    auto span = SparseUnitSpan::included_subalgebra(S, ambient);
    return modulo_center ? span.times_center() : span;
  };
  HaagReport rep;
  rep.commutant_dim = commutant_dim;
  const Interval& window = ambient.support();
  const SparseUnitSpan span0 = span_of(F);
  rep.subalgebra_dim = span0.dimension();
  rep.containment_residual = max_residual(span0);
  if (rep.containment_residual <= tol) {
    rep.minimal_radius = 0;
  } else {
    SiteSet previous = F;
    for (long R = 1; R <= static_cast<long>(window.length()); ++R) {
      SiteSet grown = F.enlarged(R, window);
      if (grown.sites() == previous.sites()) continue;
      previous = grown;
      if (max_residual(span_of(grown)) <= tol) {
        rep.minimal_radius = R;
        break;
      }
    }
  }
  rep.pass = rep.minimal_radius && *rep.minimal_radius <= allowed_radius &&
             (*rep.minimal_radius > 0 || rep.commutant_dim == rep.subalgebra_dim);
  return rep;
}

template <class Op>
HaagReport containment_of(const std::vector<Op>& basis, const LocalAlgebra& ambient, const SiteSet& F, double tol,
                          long allowed_radius, bool modulo_center) {
  auto max_residual = [&](const SparseUnitSpan& span) {
    double worst = 0.0;
    for (const auto& x : basis) worst = std::max(worst, span.residual(x));
    return worst;
  };
  return containment_search(basis.size(), max_residual, ambient, F, tol, allowed_radius, modulo_center);
}

}  // namespace

HaagReport containment_report(const std::vector<BlockOperator>& commutant_basis, const LocalAlgebra& ambient,
                              const SiteSet& F, double tol, long allowed_radius, bool modulo_center) {
  return containment_of(commutant_basis, ambient, F, tol, allowed_radius, modulo_center);
}

HaagReport containment_report(const std::vector<PartialPermutation>& commutant_basis, const LocalAlgebra& ambient,
                              const SiteSet& F, double tol, long allowed_radius, bool modulo_center) {
  return containment_of(commutant_basis, ambient, F, tol, allowed_radius, modulo_center);
}

HaagReport haag_check(std::shared_ptr<const Graph> g, const Interval& Lambda, const SiteSet& F,
                      std::optional<std::size_t> ancilla_dim, double tol, long allowed_radius,
                      bool modulo_center) {
  for (long s : F.sites())
    if (!Lambda.contains(s)) throw DomainError("subset " + F.to_string() + " is not contained in Lambda");
  std::optional<RegisterShape> anc;
  if (ancilla_dim) anc = RegisterShape::uniform(Lambda.lo, Lambda.hi, *ancilla_dim);
  const LocalAlgebra ambient(std::move(g), Lambda, anc);

  HaagReport rep;
  const SiteSet outside = F.complement_in(Lambda);
  if (outside.empty()) {
    rep.commutant_dim = ambient.dimension();
    rep.subalgebra_dim = ambient.dimension();
    rep.minimal_radius = 0;
    rep.pass = true;
    rep.warnings.push_back("subset equals Lambda: complement empty, vacuous pass");
    return rep;
  }

  std::vector<PartialPermutation> gens;
  for (const auto& C : outside.components())
    for (auto& p : included_interval_generators(restricted_algebra(ambient, C), ambient)) gens.push_back(std::move(p));
  rep = containment_report(unit_commutant(gens, ambient), ambient, F, tol, allowed_radius, modulo_center);
  return rep;
}

NetReport validate_net(std::shared_ptr<const Graph> g, std::size_t max_interval, std::mt19937_64& rng,
                       double tol, const InclusionMap& inclusion) {
  const InclusionMap iota = inclusion ? inclusion : InclusionMap([](const BlockOperator& f, const Interval& J) {
    return include(f, J);
  });
  std::vector<Interval> intervals;
  for (long lo = 0; lo < static_cast<long>(max_interval); ++lo)
    for (long hi = lo; hi < static_cast<long>(max_interval); ++hi) intervals.emplace_back(lo, hi);

  double unital = 0.0, multiplicative = 0.0, star = 0.0, injective = 0.0, isotony = 0.0, locality = 0.0;
  for (const auto& I : intervals) {
    const LocalAlgebra AI(g, I);
    for (const auto& J : intervals) {
      if (!J.contains(I)) continue;
      const LocalAlgebra AJ(g, J);
      unital = std::max(unital, (iota(BlockOperator::identity(AI), J) - BlockOperator::identity(AJ)).max_abs());
      const auto f = random_dyadic_operator(AI, rng);
      const auto h = random_dyadic_operator(AI, rng);
      multiplicative = std::max(multiplicative, (iota(f * h, J) - iota(f, J) * iota(h, J)).max_abs());
      star = std::max(star, (iota(f.adjoint(), J) - iota(f, J).adjoint()).max_abs());

      // images of the matrix units must stay linearly independent
      Matrix images(static_cast<Index>(AJ.dimension()), static_cast<Index>(AI.dimension()));
      Index col = 0;
      const std::size_t t = AI.vertex_count();
      for (std::size_t b = 0; b < t * t; ++b)
        for (std::size_t r = 0; r < AI.block_dim(b / t, b % t); ++r)
          for (std::size_t c = 0; c < AI.block_dim(b / t, b % t); ++c)
            images.col(col++) = iota(BlockOperator::matrix_unit(AI, b / t, b % t, r, c), J).vectorize();
      injective = std::max(injective, static_cast<double>(AI.dimension() - static_cast<std::size_t>(linalg::rank(images))));

      const Interval whole(0, static_cast<long>(max_interval) - 1);
      isotony = std::max(isotony, (iota(iota(f, J), whole) - iota(f, whole)).max_abs());
    }
  }
  for (const auto& I1 : intervals)
    for (const auto& I2 : intervals) {
      if (I1.hi >= I2.lo) continue;
      const Interval hull(I1.lo, I2.hi);
      const auto a = iota(random_dyadic_operator(LocalAlgebra(g, I1), rng), hull);
      const auto b = iota(random_dyadic_operator(LocalAlgebra(g, I2), rng), hull);
      locality = std::max(locality, commutator(a, b).max_abs());
    }

  NetReport rep;
  rep.axioms = {{"unital", unital, unital <= tol},
                {"multiplicative", multiplicative, multiplicative <= tol},
                {"star", star, star <= tol},
                {"injective", injective, injective == 0.0},
                {"isotony", isotony, isotony <= tol},
                {"locality", locality, locality <= tol}};
  rep.pass = std::all_of(rep.axioms.begin(), rep.axioms.end(), [](const AxiomResult& a) { return a.pass; });
  return rep;
}

}  // namespace stabnet
