#include "stabnet/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "stabnet/errors.hpp"

namespace stabnet {

namespace {

using Index = Eigen::Index;
using Triplet = Eigen::Triplet<cplx>;

std::size_t product(const std::vector<std::size_t>& dims, std::size_t from = 0) {
  std::size_t p = 1;
  for (std::size_t r = from; r < dims.size(); ++r) {
    if (dims[r] != 0 && p > std::numeric_limits<std::size_t>::max() / dims[r])
      throw DomainError("basis dimension overflows");
    p *= dims[r];
  }
  return p;
}

// |x, n1, rest> -> |m n1 + x, rest>, inverse by the mod formula
BasisBijection interleave(std::size_t m, const RegisterShape& regs, const char* what) {
  if (m == 0) throw DomainError(std::string(what) + " requires a positive label count");
  if (regs.size() == 0) throw DomainError(std::string(what) + " requires at least one register");
  const auto dims = regs.dims();
  const std::size_t D = dims[0];
  const std::size_t R = product(dims, 1);
  BasisBijection b;
  b.domain_dims = {m};
  b.domain_dims.insert(b.domain_dims.end(), dims.begin(), dims.end());
  b.codomain_dims = dims;
  b.codomain_dims[0] = m * D;
  const std::size_t total = m * D * R;
  b.forward.resize(total);
  b.inverse.resize(total);
  for (std::size_t x = 0; x < total; ++x) {
    const std::size_t label = x / (D * R);
    const std::size_t n1 = (x / R) % D;
    b.forward[x] = (m * n1 + label) * R + x % R;
  }
  for (std::size_t y = 0; y < total; ++y) {
    const std::size_t merged = y / R;
    const std::size_t label = merged % m;
    const std::size_t n1 = (merged - label) / m;
    b.inverse[y] = (label * D + n1) * R + y % R;
  }
  return b;
}

const Graph& single_loop() {
  static const Graph g = Graph::single_vertex(1);
  return g;
}

}  // namespace

bool BasisBijection::is_bijection() const {
  if (forward.size() != inverse.size()) return false;
  const std::size_t n = forward.size();
  for (std::size_t x = 0; x < n; ++x)
    if (forward[x] >= n || inverse[forward[x]] != x) return false;
  for (std::size_t y = 0; y < n; ++y)
    if (inverse[y] >= n || forward[inverse[y]] != y) return false;
  return true;
}

BasisBijection phi(std::size_t l, const RegisterShape& regs) { return interleave(l, regs, "phi"); }

BasisBijection psi(std::size_t t, const RegisterShape& regs) { return interleave(t, regs, "psi"); }

BasisBijection psi_ragged(const std::vector<std::size_t>& branch_dims, const std::vector<std::size_t>& rest) {
  if (branch_dims.empty()) throw DomainError("psi requires at least one branch");
  const std::size_t t = branch_dims.size();
  const std::size_t R = product(rest);
  std::vector<std::size_t> offset(t + 1, 0);
  for (std::size_t j = 0; j < t; ++j) offset[j + 1] = offset[j] + branch_dims[j];
  const std::size_t pairs = offset[t];
  const std::size_t deepest = *std::max_element(branch_dims.begin(), branch_dims.end());

  // rank of (j, n1) in the order n1 first, then j
  std::vector<std::size_t> rank(pairs);
  std::vector<std::size_t> unrank(pairs);
  std::size_t next = 0;
  for (std::size_t n1 = 0; n1 < deepest; ++n1)
    for (std::size_t j = 0; j < t; ++j)
      if (n1 < branch_dims[j]) {
        rank[offset[j] + n1] = next;
        unrank[next] = offset[j] + n1;
        ++next;
      }

  BasisBijection b;
  b.domain_dims = {t, deepest};
  b.domain_dims.insert(b.domain_dims.end(), rest.begin(), rest.end());
  b.codomain_dims = {pairs};
  b.codomain_dims.insert(b.codomain_dims.end(), rest.begin(), rest.end());
  b.forward.resize(pairs * R);
  b.inverse.resize(pairs * R);
  for (std::size_t x = 0; x < pairs * R; ++x) b.forward[x] = rank[x / R] * R + x % R;
  for (std::size_t y = 0; y < pairs * R; ++y) b.inverse[y] = unrank[y / R] * R + y % R;
  return b;
}

std::uint64_t LambdaBlock::key(const std::uint32_t* tuple) const {
  std::uint64_t k = 0;
  for (std::size_t s = 0; s < register_count; ++s) k = k * codomain_shape.registers[s].dim + tuple[s];
  return k;
}

std::optional<std::size_t> LambdaBlock::find(const std::uint32_t* tuple) const {
  for (std::size_t s = 0; s < register_count; ++s)
    if (tuple[s] >= codomain_shape.registers[s].dim) return std::nullopt;
  auto it = position_.find(key(tuple));
  if (it == position_.end()) return std::nullopt;
  return it->second;
}

LambdaBlock build_lambda(const Graph& g, Vertex i, Vertex j, std::size_t n_blocks, std::size_t half_block,
                         std::size_t D) {
  const std::size_t t = g.vertex_count();
  if (i >= t || j >= t) throw DomainError("boundary vertex out of range");
  if (n_blocks < 2) throw DomainError("Lambda needs at least two blocks");
  if (half_block == 0) throw DomainError("half block length must be positive");
  if (D == 0) throw DomainError("ancilla dimension must be positive");
  const std::size_t reach = uniform_reach(g);
  if (2 * half_block < reach)
    throw DomainError("block length " + std::to_string(2 * half_block) + " is below the uniform reach " +
                      std::to_string(reach));
  const std::size_t k = half_block;
  const std::size_t n = n_blocks;
  const std::size_t L = 2 * k * n;
  const PathTable full(g, L);
  const PathTable seg(g, 2 * k);
  const std::size_t anc_dim = product(std::vector<std::size_t>(L, D));

  LambdaBlock lb;
  lb.i = i;
  lb.j = j;
  lb.path_count = full.count(i, j);
  lb.register_count = L;
  const std::size_t total = lb.path_count * anc_dim;

  std::vector<std::uint32_t> raw(total * L);
  std::vector<std::size_t> vertex(n + 1), rank(n), l(n);
  std::vector<std::size_t> digits(L);
  for (std::size_t p = 0; p < lb.path_count; ++p) {
    const auto& edges = full.paths(i, j)[p].edges;
    vertex[0] = i;
    vertex[n] = j;
    for (std::size_t b = 1; b < n; ++b) vertex[b] = edges[2 * k * b].source;
    for (std::size_t b = 0; b < n; ++b) {
      l[b] = seg.count(vertex[b], vertex[b + 1]);
      rank[b] = seg.rank(vertex[b], vertex[b + 1], edges, 2 * k * b, 2 * k * (b + 1));
    }
    for (std::size_t a = 0; a < anc_dim; ++a) {
      std::size_t rem = a;
      for (std::size_t s = L; s-- > 0;) {
        digits[s] = rem % D;
        rem /= D;
      }
      std::uint32_t* c = raw.data() + (p * anc_dim + a) * L;
      for (std::size_t s = 0; s < L; ++s) c[s] = static_cast<std::uint32_t>(digits[s]);
      for (std::size_t b = 0; b < n; ++b) c[2 * k * b] = static_cast<std::uint32_t>(l[b] * c[2 * k * b] + rank[b]);
      for (std::size_t b = 1; b < n; ++b) {
        auto& r = c[2 * k * b - k];
        r = static_cast<std::uint32_t>(t * r + vertex[b]);
      }
    }
  }

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(raw.begin() + static_cast<long>(x * L), raw.begin() + static_cast<long>((x + 1) * L),
                                        raw.begin() + static_cast<long>(y * L), raw.begin() + static_cast<long>((y + 1) * L));
  };
  std::sort(order.begin(), order.end(), less);

  std::vector<Register> shape(L);
  for (std::size_t s = 0; s < L; ++s) shape[s] = {static_cast<long>(s), 1};
  lb.tuples.resize(total * L);
  lb.bijection.forward.resize(total);
  for (std::size_t pos = 0; pos < total; ++pos) {
    const std::uint32_t* c = raw.data() + order[pos] * L;
    if (pos > 0 && !less(order[pos - 1], order[pos])) throw Error("Lambda is not injective");
    std::copy(c, c + L, lb.tuples.begin() + static_cast<long>(pos * L));
    lb.bijection.forward[order[pos]] = pos;
    for (std::size_t s = 0; s < L; ++s) shape[s].dim = std::max<std::size_t>(shape[s].dim, c[s] + 1);
  }
  lb.codomain_shape = RegisterShape(std::move(shape));
  lb.bijection.domain_dims = {lb.path_count};
  lb.bijection.domain_dims.resize(L + 1, D);
  lb.bijection.codomain_dims = lb.codomain_shape.dims();
  {
    long double box = 1;
    for (auto d : lb.bijection.codomain_dims) box *= static_cast<long double>(d);
    if (box >= 18446744073709551615.0L) throw DomainError("codomain too large for 64-bit keys");
  }
  lb.position_.reserve(total);
  for (std::size_t pos = 0; pos < total; ++pos) lb.position_.emplace(lb.key(lb.tuple(pos)), pos);

  // inverse by decoding: Psi^{-1} recovers the block vertices, Phi^{-1} the segments
  lb.bijection.inverse.resize(total);
  std::vector<Edge> edges;
  for (std::size_t pos = 0; pos < total; ++pos) {
    const std::uint32_t* c = lb.tuple(pos);
    for (std::size_t s = 0; s < L; ++s) digits[s] = c[s];
    vertex[0] = i;
    vertex[n] = j;
    for (std::size_t b = 1; b < n; ++b) {
      vertex[b] = digits[2 * k * b - k] % t;
      digits[2 * k * b - k] /= t;
    }
    edges.clear();
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t lb_count = seg.count(vertex[b], vertex[b + 1]);
      const std::size_t r = digits[2 * k * b] % lb_count;
      digits[2 * k * b] = (digits[2 * k * b] - r) / lb_count;
      const auto& part = seg.paths(vertex[b], vertex[b + 1])[r].edges;
      edges.insert(edges.end(), part.begin(), part.end());
    }
    std::size_t x = full.rank(i, j, edges);
    for (std::size_t s = 0; s < L; ++s) x = x * D + digits[s];
    lb.bijection.inverse[pos] = x;
  }
  return lb;
}

LambdaFamily::LambdaFamily(std::shared_ptr<const Graph> g, std::size_t n_blocks, std::size_t half_block,
                           std::size_t D)
    : graph_(std::move(g)), n_(n_blocks), k_(half_block), D_(D) {
  const std::size_t t = graph_->vertex_count();
  const std::size_t L = site_count();
  std::vector<Register> shape(L);
  for (std::size_t s = 0; s < L; ++s) shape[s] = {static_cast<long>(s), 1};
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j) {
      blocks_.push_back(build_lambda(*graph_, i, j, n_, k_, D_));
      const auto& regs = blocks_.back().codomain_shape.registers;
      for (std::size_t s = 0; s < L; ++s) shape[s].dim = std::max(shape[s].dim, regs[s].dim);
    }
  shape_ = RegisterShape(std::move(shape));
}

Interval LambdaFamily::whole() const { return {0, static_cast<long>(site_count()) - 1}; }

Interval LambdaFamily::middle() const {
  return {static_cast<long>(k_), static_cast<long>(site_count() - k_) - 1};
}

LocalAlgebra LambdaFamily::domain_algebra() const {
  return LocalAlgebra(graph_, whole(), RegisterShape::uniform(0, whole().hi, D_));
}

LocalAlgebra register_algebra(const std::vector<Register>& registers) {
  if (registers.empty()) throw DomainError("register operator needs at least one register");
  for (std::size_t r = 1; r < registers.size(); ++r)
    if (registers[r].site <= registers[r - 1].site) throw DomainError("registers must be listed by increasing site");
  return LocalAlgebra(std::make_shared<const Graph>(single_loop()),
                      Interval(registers.front().site, registers.back().site), RegisterShape(registers));
}

SectorDecomposition admissible_sectors(const std::vector<const LambdaFamily*>& families,
                                       const std::vector<long>& sites) {
  if (families.empty()) throw DomainError("no Lambda family given");
  SectorDecomposition out;
  for (long s : sites) {
    std::size_t dim = 1;
    for (const auto* f : families) {
      if (!f->middle().contains(s)) throw ShapeMismatch("register site " + std::to_string(s) + " is not in the middle interval");
      dim = std::max(dim, f->codomain_shape().registers[static_cast<std::size_t>(s)].dim);
    }
    out.registers.push_back({s, dim});
  }
  std::sort(out.registers.begin(), out.registers.end(), [](const Register& a, const Register& b) { return a.site < b.site; });
  std::size_t values = 1;
  for (const auto& r : out.registers) values *= r.dim;

  std::unordered_map<std::string, int> fiber_id;
  std::vector<std::vector<int>> signature(values);
  std::vector<std::uint32_t> rest;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const auto& fam = *families[fi];
    const std::size_t t = fam.graph().vertex_count();
    for (std::size_t b = 0; b < t * t; ++b) {
      const auto& lb = fam.block(b / t, b % t);
      for (std::size_t pos = 0; pos < lb.size(); ++pos) {
        const std::uint32_t* c = lb.tuple(pos);
        rest.assign(c, c + lb.register_count);
        std::size_t w = 0;
        for (const auto& r : out.registers) {
          w = w * r.dim + c[r.site];
          rest[static_cast<std::size_t>(r.site)] = 0;
        }
        std::string key(reinterpret_cast<const char*>(rest.data()), rest.size() * sizeof(std::uint32_t));
        const std::size_t tag[2] = {fi, b};
        key.append(reinterpret_cast<const char*>(tag), sizeof(tag));
        auto [it, fresh] = fiber_id.emplace(std::move(key), static_cast<int>(fiber_id.size()));
        (void)fresh;
        signature[w].push_back(it->second);
      }
    }
  }
  std::map<std::vector<int>, std::size_t> atom_of;
  for (std::size_t w = 0; w < values; ++w) {
    auto& sig = signature[w];
    std::sort(sig.begin(), sig.end());
    auto [it, fresh] = atom_of.emplace(sig, out.atoms.size());
    if (fresh) out.atoms.emplace_back();
    out.atoms[it->second].push_back(w);
  }
  return out;
}

BlockOperator random_admissible_operator(const SectorDecomposition& sectors, std::mt19937_64& rng, bool dyadic) {
  const LocalAlgebra alg = register_algebra(sectors.registers);
  BlockOperator a(alg);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(-8, 8);
  auto draw = [&] { return dyadic ? pick(rng) / 8.0 : normal(rng); };
  for (const auto& atom : sectors.atoms)
    for (auto r : atom)
      for (auto c : atom) {
        const double re = draw();
        const double im = draw();
        a.block(0)(static_cast<Index>(r), static_cast<Index>(c)) = cplx(re, im);
      }
  return a;
}

SparseBlockOperator::SparseBlockOperator(LocalAlgebra alg) : algebra(std::move(alg)) {
  const std::size_t t = algebra.vertex_count();
  for (std::size_t b = 0; b < t * t; ++b) {
    const auto d = static_cast<Index>(algebra.block_dim(b / t, b % t));
    blocks.emplace_back(d, d);
  }
}

SparseBlockOperator SparseBlockOperator::from_dense(const BlockOperator& x) {
  SparseBlockOperator out(x.algebra());
  for (std::size_t b = 0; b < out.blocks.size(); ++b) out.blocks[b] = x.block(b).sparseView(cplx(0.0), 0.0);
  return out;
}

BlockOperator SparseBlockOperator::dense() const {
  BlockOperator out(algebra);
  for (std::size_t b = 0; b < blocks.size(); ++b) out.block(b) = Matrix(blocks[b]);
  return out;
}

SparseBlockOperator SparseBlockOperator::adjoint() const {
  SparseBlockOperator out(algebra);
  for (std::size_t b = 0; b < blocks.size(); ++b) out.blocks[b] = blocks[b].adjoint();
  return out;
}

double SparseBlockOperator::max_abs() const {
  double m = 0.0;
  for (const auto& blk : blocks)
    for (Index c = 0; c < blk.outerSize(); ++c)
      for (Sparse::InnerIterator it(blk, c); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

SparseBlockOperator operator*(const SparseBlockOperator& a, const SparseBlockOperator& b) {
  if (!(a.algebra == b.algebra)) throw ShapeMismatch("product of operators with different support or ancilla");
  SparseBlockOperator out(a.algebra);
  for (std::size_t k = 0; k < a.blocks.size(); ++k) out.blocks[k] = a.blocks[k] * b.blocks[k];
  return out;
}

SparseBlockOperator operator-(const SparseBlockOperator& a, const SparseBlockOperator& b) {
  if (!(a.algebra == b.algebra)) throw ShapeMismatch("difference of operators with different support or ancilla");
  SparseBlockOperator out(a.algebra);
  for (std::size_t k = 0; k < a.blocks.size(); ++k) out.blocks[k] = a.blocks[k] - b.blocks[k];
  return out;
}

SparseBlockOperator alpha_sparse(const BlockOperator& a, const LambdaFamily& family) {
  const auto& alg = a.algebra();
  if (alg.vertex_count() != 1 || alg.graph().multiplicity(0, 0) != 1 || !alg.ancilla())
    throw ShapeMismatch("alpha expects an operator on codomain registers");
  const auto& regs = alg.ancilla()->registers;
  for (const auto& r : regs) {
    if (!family.middle().contains(r.site))
      throw ShapeMismatch("register at site " + std::to_string(r.site) + " lies outside the middle interval");
    if (family.codomain_shape().registers[static_cast<std::size_t>(r.site)].dim != r.dim)
      throw ShapeMismatch("register dimension differs from the codomain at site " + std::to_string(r.site));
  }
  const Matrix& m = a.block(0);
  const auto W = static_cast<Index>(alg.ancilla_dim());

  SparseBlockOperator out(family.domain_algebra());
  const std::size_t t = family.graph().vertex_count();
  std::vector<std::uint32_t> target;
  for (std::size_t b = 0; b < t * t; ++b) {
    const auto& lb = family.block(b / t, b % t);
    std::vector<Triplet> trips;
    for (std::size_t y = 0; y < lb.size(); ++y) {
      const std::size_t pos = lb.bijection.forward[y];
      const std::uint32_t* c = lb.tuple(pos);
      Index w = 0;
      for (const auto& r : regs) w = w * static_cast<Index>(r.dim) + c[r.site];
      target.assign(c, c + lb.register_count);
      for (Index w2 = 0; w2 < W; ++w2) {
        const cplx val = m(w2, w);
        if (val == cplx(0.0)) continue;
        Index rem = w2;
        for (std::size_t r = regs.size(); r-- > 0;) {
          target[static_cast<std::size_t>(regs[r].site)] = static_cast<std::uint32_t>(rem % static_cast<Index>(regs[r].dim));
          rem /= static_cast<Index>(regs[r].dim);
        }
        const auto hit = lb.find(target.data());
        if (!hit) throw ShapeMismatch("operator leaves truncated codomain");
        trips.emplace_back(static_cast<Index>(lb.bijection.inverse[*hit]), static_cast<Index>(y), val);
      }
    }
    out.blocks[b].setFromTriplets(trips.begin(), trips.end());
  }
  return out;
}

BlockOperator alpha(const BlockOperator& a, const LambdaFamily& family) { return alpha_sparse(a, family).dense(); }

SpreadContext::SpreadContext(LocalAlgebra ambient) : ambient_(std::move(ambient)) {}

const std::vector<SpreadContext::Generator>& SpreadContext::generators_outside(const SiteSet& inside) {
  const auto key = inside.sites();
  for (const auto& [k, gens] : cache_)
    if (k == key) return gens;
  std::vector<Generator> gens;
  const std::size_t t = ambient_.vertex_count();
  const SiteSet outside = inside.complement_in(ambient_.support());
  for (const auto& C : outside.components()) {
    const LocalAlgebra local = restricted_algebra(ambient_, C);
    const Embedding emb = embedding(local, ambient_);
    for (const auto& unit : interval_generators(local))
      for (std::size_t b = 0; b < unit.entries.size(); ++b)
        for (auto [r, c] : unit.entries[b]) {
          std::ostringstream label;
          label << "unit (" << r << "," << c << ") of block (" << b / t << "," << b % t << ") on sites [" << C.lo
                << "," << C.hi << "]";
          gens.push_back({label.str(), include_unit(emb, ambient_, b, r, c)});
        }
  }
  cache_.emplace_back(key, std::move(gens));
  return cache_.back().second;
}

namespace {

double sparse_commutator(const SparseBlockOperator& x,
                         const std::vector<Eigen::SparseMatrix<cplx, Eigen::RowMajor>>& rows,
                         const PartialPermutation& g) {
  double worst = 0.0;
  std::unordered_map<std::uint64_t, cplx> acc;
  for (std::size_t b = 0; b < g.entries.size(); ++b) {
    if (g.entries[b].empty()) continue;
    acc.clear();
    const auto& cm = x.blocks[b];
    const auto& rm = rows[b];
    const auto n = static_cast<std::uint64_t>(cm.rows());
    for (auto [r, c] : g.entries[b]) {
      // (x g)(:, c) = x(:, r);  (g x)(r, :) = x(c, :)
      for (SparseBlockOperator::Sparse::InnerIterator it(cm, static_cast<Index>(r)); it; ++it)
        acc[static_cast<std::uint64_t>(it.row()) * n + c] += it.value();
      for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(rm, static_cast<Index>(c)); it; ++it)
        acc[static_cast<std::uint64_t>(r) * n + static_cast<std::uint64_t>(it.col())] -= it.value();
    }
    for (const auto& [k, v] : acc) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace

SpreadReport spread_certificate(SpreadContext& ctx, const SparseBlockOperator& x, const Interval& support,
                                long bound, double tol) {
  if (!(x.algebra == ctx.ambient())) throw ShapeMismatch("operator does not live in the certificate's algebra");
  const Interval window = ctx.ambient().support();
  std::vector<Eigen::SparseMatrix<cplx, Eigen::RowMajor>> rows;
  for (const auto& blk : x.blocks) rows.emplace_back(blk);
  const SiteSet base = SiteSet::of(support);

  auto worst_outside = [&](long radius, std::string* witness) {
    double worst = 0.0;
    for (const auto& gen : ctx.generators_outside(base.enlarged(radius, window))) {
      const double r = sparse_commutator(x, rows, gen.unit);
      if (r > worst) {
        worst = r;
        if (witness) *witness = gen.label;
      }
    }
    return worst;
  };

  SpreadReport rep;
  const long diameter = static_cast<long>(window.length());
  rep.radius = diameter;
  for (long R = 0; R <= diameter; ++R) {
    std::string witness;
    if (worst_outside(R, &witness) <= tol) {
      rep.radius = R;
      break;
    }
    rep.witness = witness;
  }
  rep.residual = worst_outside(std::max(bound, 0L), nullptr);
  rep.pass = rep.radius <= bound && rep.residual <= tol;
  return rep;
}

SpreadReport spread_certificate(const BlockOperator& x, const Interval& support, long bound, double tol) {
  SpreadContext ctx(x.algebra());
  return spread_certificate(ctx, SparseBlockOperator::from_dense(x), support, bound, tol);
}

StabilizedState StabilizedState::from_trace(const LocalAlgebra& base, const TraceData& td, Vector xi) {
  if (base.ancilla()) throw ShapeMismatch("base state lives on the path algebra without ancilla");
  StabilizedState s{base, {}, std::move(xi)};
  const auto w = markov_weights(base, td);
  const std::size_t t = base.vertex_count();
  for (std::size_t b = 0; b < t * t; ++b) {
    const auto d = static_cast<Index>(base.block_dim(b / t, b % t));
    s.density.push_back(w[b] * Matrix::Identity(d, d));
  }
  return s;
}

cplx stabilized_state_eval(const StabilizedState& s, const BlockOperator& f) {
  if (std::abs(s.xi.norm() - 1.0) > 1e-12) throw DomainError("ancilla vector is not normalized");
  const auto& alg = f.algebra();
  if (!(alg.graph() == s.base.graph()) || !(alg.support() == s.base.support()))
    throw ShapeMismatch("operator and state live on different path algebras");
  Vector product = Vector::Ones(1);
  if (alg.ancilla())
    for (const auto& r : alg.ancilla()->registers) {
      if (r.dim != static_cast<std::size_t>(s.xi.size())) throw ShapeMismatch("ancilla register dimension differs from xi");
      Vector next(product.size() * s.xi.size());
      for (Index a = 0; a < product.size(); ++a) next.segment(a * s.xi.size(), s.xi.size()) = product(a) * s.xi;
      product = std::move(next);
    }
  const auto A = product.size();
  cplx total = 0.0;
  const std::size_t t = alg.vertex_count();
  for (std::size_t b = 0; b < t * t; ++b) {
    const auto paths = static_cast<Index>(alg.path_count(b / t, b % t));
    if (paths == 0) continue;
    const Matrix& fb = f.block(b);
    Matrix reduced(paths, paths);
    for (Index p = 0; p < paths; ++p)
      for (Index q = 0; q < paths; ++q)
        reduced(p, q) = product.dot(fb.block(p * A, q * A, A, A) * product);
    total += (s.density[b] * reduced).trace();
  }
  return total;
}

}  // namespace stabnet
