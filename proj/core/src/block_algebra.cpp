#include "stabnet/block_algebra.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "stabnet/errors.hpp"

namespace stabnet {

RegisterShape::RegisterShape(std::vector<Register> regs) : registers(std::move(regs)) {
  for (const auto& r : registers)
    if (r.dim == 0) throw DomainError("register dimension must be positive");
}

RegisterShape RegisterShape::uniform(long lo, long hi, std::size_t dim) {
  std::vector<Register> regs;
  for (long s = lo; s <= hi; ++s) regs.push_back({s, dim});
  return RegisterShape(std::move(regs));
}

std::size_t RegisterShape::total_dim() const {
  std::size_t total = 1;
  for (const auto& r : registers) total *= r.dim;
  return total;
}

std::vector<std::size_t> RegisterShape::dims() const {
  std::vector<std::size_t> out;
  for (const auto& r : registers) out.push_back(r.dim);
  return out;
}

LocalAlgebra::LocalAlgebra(std::shared_ptr<const Graph> graph, Interval support,
                           std::optional<RegisterShape> ancilla)
    : graph_(std::move(graph)), support_(support), ancilla_(std::move(ancilla)) {
  if (!graph_) throw DomainError("local algebra needs a graph");
  if (ancilla_) ancilla_dim_ = ancilla_->total_dim();
  counts_ = graph_->power(support_.length());
}

std::size_t LocalAlgebra::dimension() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < vertex_count(); ++i)
    for (std::size_t j = 0; j < vertex_count(); ++j) total += block_dim(i, j) * block_dim(i, j);
  return total;
}

bool operator==(const LocalAlgebra& a, const LocalAlgebra& b) {
  return (a.graph_ == b.graph_ || *a.graph_ == *b.graph_) && a.support_ == b.support_ &&
         a.ancilla_ == b.ancilla_;
}

BlockOperator::BlockOperator(LocalAlgebra algebra) : algebra_(std::move(algebra)) {
  const std::size_t t = algebra_.vertex_count();
  blocks_.reserve(t * t);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j) {
      const auto d = static_cast<Eigen::Index>(algebra_.block_dim(i, j));
      blocks_.push_back(Matrix::Zero(d, d));
    }
}

BlockOperator BlockOperator::identity(const LocalAlgebra& algebra) {
  BlockOperator out(algebra);
  for (auto& b : out.blocks_) b.setIdentity();
  return out;
}

BlockOperator BlockOperator::matrix_unit(const LocalAlgebra& algebra, Vertex i, Vertex j,
                                         std::size_t row, std::size_t col) {
  BlockOperator out(algebra);
  auto& b = out.block(i, j);
  if (row >= static_cast<std::size_t>(b.rows()) || col >= static_cast<std::size_t>(b.cols()))
    throw DomainError("matrix unit index out of range");
  b(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = 1.0;
  return out;
}

BlockOperator BlockOperator::from_vector(const LocalAlgebra& algebra, const Vector& v) {
  BlockOperator out(algebra);
  if (static_cast<std::size_t>(v.size()) != algebra.dimension())
    throw ShapeMismatch("vector length does not match algebra dimension");
  Eigen::Index offset = 0;
  for (auto& b : out.blocks_) {
    const Eigen::Index n = b.size();
    b = Eigen::Map<const Matrix>(v.data() + offset, b.rows(), b.cols());
    offset += n;
  }
  return out;
}

BlockOperator BlockOperator::adjoint() const {
  BlockOperator out(algebra_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) out.blocks_[k] = blocks_[k].adjoint();
  return out;
}

Vector BlockOperator::vectorize() const {
  Vector v(static_cast<Eigen::Index>(algebra_.dimension()));
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    v.segment(offset, b.size()) = Eigen::Map<const Vector>(b.data(), b.size());
    offset += b.size();
  }
  return v;
}

void BlockOperator::require_same(const BlockOperator& other) const {
  if (!(algebra_ == other.algebra_))
    throw ShapeMismatch("operators live in different local algebras");
}

BlockOperator& BlockOperator::operator+=(const BlockOperator& other) {
  require_same(other);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

BlockOperator& BlockOperator::operator-=(const BlockOperator& other) {
  require_same(other);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= other.blocks_[k];
  return *this;
}

BlockOperator& BlockOperator::operator*=(cplx scalar) {
  for (auto& b : blocks_) b *= scalar;
  return *this;
}

cplx BlockOperator::hs_inner(const BlockOperator& other) const {
  require_same(other);
  cplx total = 0.0;
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    total += (blocks_[k].conjugate().cwiseProduct(other.blocks_[k])).sum();
  return total;
}

double BlockOperator::norm() const {
  double total = 0.0;
  for (const auto& b : blocks_) total += b.squaredNorm();
  return std::sqrt(total);
}

double BlockOperator::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks_)
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

BlockOperator operator+(BlockOperator a, const BlockOperator& b) { return a += b; }
BlockOperator operator-(BlockOperator a, const BlockOperator& b) { return a -= b; }
BlockOperator operator*(BlockOperator a, cplx s) { return a *= s; }
BlockOperator operator*(cplx s, BlockOperator a) { return a *= s; }

BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
  if (!(a.algebra() == b.algebra()))
    throw ShapeMismatch("product of operators with different support or ancilla");
  BlockOperator out(a.algebra());
  for (std::size_t k = 0; k < a.algebra().block_count(); ++k) out.block(k).noalias() = a.block(k) * b.block(k);
  return out;
}

BlockOperator commutator(const BlockOperator& a, const BlockOperator& b) { return a * b - b * a; }

BlockOperator identity(std::shared_ptr<const Graph> g, Interval I, std::optional<RegisterShape> ancilla) {
  return BlockOperator::identity(LocalAlgebra(std::move(g), I, std::move(ancilla)));
}

namespace {

struct AncillaSplit {
  std::size_t left = 1;   // product of register dims before the embedded registers
  std::size_t right = 1;  // product after
};

AncillaSplit split_ancilla(const LocalAlgebra& from, const LocalAlgebra& to) {
  if (from.ancilla().has_value() != to.ancilla().has_value())
    throw ShapeMismatch("ancilla present on one side of the inclusion only");
  if (!from.ancilla()) return {};
  const auto& inner = from.ancilla()->registers;
  const auto& outer = to.ancilla()->registers;
  for (std::size_t off = 0; off + inner.size() <= outer.size(); ++off) {
    if (!std::equal(inner.begin(), inner.end(), outer.begin() + static_cast<long>(off))) continue;
    AncillaSplit s;
    for (std::size_t r = 0; r < off; ++r) s.left *= outer[r].dim;
    for (std::size_t r = off + inner.size(); r < outer.size(); ++r) s.right *= outer[r].dim;
    return s;
  }
  throw ShapeMismatch("ancilla registers of the source are not a contiguous part of the target");
}

}  // namespace

Embedding embedding(const LocalAlgebra& from, const LocalAlgebra& to) {
  if (!(from.graph() == to.graph())) throw ShapeMismatch("graph mismatch in inclusion");
  if (!to.support().contains(from.support()))
    throw ShapeMismatch("inclusion requires I to be contained in J");
  const AncillaSplit anc = split_ancilla(from, to);
  const std::size_t anc_from = from.ancilla_dim();
  const std::size_t anc_to = to.ancilla_dim();

  const Graph& g = to.graph();
  const std::size_t t = g.vertex_count();
  const std::size_t left_len = static_cast<std::size_t>(from.support().lo - to.support().lo);
  const std::size_t mid_len = from.support().length();
  const PathTable outer(g, to.support().length());
  const PathTable inner(g, mid_len);

  Embedding emb;
  emb.groups.resize(t * t);
  for (std::size_t ti = 0; ti < t; ++ti)
    for (std::size_t tj = 0; tj < t; ++tj) {
      auto& groups = emb.groups[ti * t + tj];
      std::unordered_map<std::string, std::size_t> group_of;
      const auto& paths = outer.paths(ti, tj);
      for (std::size_t pj = 0; pj < paths.size(); ++pj) {
        const auto& edges = paths[pj].edges;
        const Vertex si = edges[left_len].source;
        const Vertex sj = edges[left_len + mid_len - 1].target;
        const std::size_t mid = inner.rank(si, sj, edges, left_len, left_len + mid_len);
        const std::size_t src_block = si * t + sj;
        std::string env;
        for (std::size_t s = 0; s < edges.size(); ++s) {
          if (s >= left_len && s < left_len + mid_len) continue;
          const auto id = static_cast<std::uint32_t>(g.edge_id(edges[s]));
          env.append(reinterpret_cast<const char*>(&id), sizeof(id));
        }
        for (std::size_t al = 0; al < anc.left; ++al)
          for (std::size_t am = 0; am < anc_from; ++am)
            for (std::size_t ar = 0; ar < anc.right; ++ar) {
              const std::size_t target = pj * anc_to + (al * anc_from + am) * anc.right + ar;
              const std::size_t source = mid * anc_from + am;
              std::string key = env;
              const std::size_t tag[3] = {src_block, al, ar};
              key.append(reinterpret_cast<const char*>(tag), sizeof(tag));
              auto [it, fresh] = group_of.emplace(std::move(key), groups.size());
              if (fresh) {
                Embedding::Group grp;
                grp.source_block = src_block;
                grp.target.assign(from.block_dim(si, sj), 0);
                groups.push_back(std::move(grp));
              }
              groups[it->second].target[source] = target;
            }
      }
    }
  return emb;
}

LocalAlgebra extended_algebra(const LocalAlgebra& from, Interval J) {
  if (!J.contains(from.support())) throw ShapeMismatch("inclusion requires I to be contained in J");
  if (!from.ancilla()) return LocalAlgebra(from.graph_ptr(), J);
  const auto& regs = from.ancilla()->registers;
  if (regs.empty()) return LocalAlgebra(from.graph_ptr(), J, from.ancilla());
  const std::size_t d = regs.front().dim;
  std::vector<Register> out;
  for (long s = J.lo; s < from.support().lo; ++s) out.push_back({s, d});
  out.insert(out.end(), regs.begin(), regs.end());
  for (long s = from.support().hi + 1; s <= J.hi; ++s) out.push_back({s, d});
  return LocalAlgebra(from.graph_ptr(), J, RegisterShape(std::move(out)));
}

BlockOperator include(const BlockOperator& f, const LocalAlgebra& target) {
  const Embedding emb = embedding(f.algebra(), target);
  BlockOperator out(target);
  for (std::size_t b = 0; b < emb.groups.size(); ++b) {
    auto& dst = out.block(b);
    for (const auto& grp : emb.groups[b]) {
      const Matrix& src = f.block(grp.source_block);
      const std::size_t n = grp.target.size();
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r)
          dst(static_cast<Eigen::Index>(grp.target[r]), static_cast<Eigen::Index>(grp.target[c])) =
              src(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

BlockOperator include(const BlockOperator& f, Interval J) {
  return include(f, extended_algebra(f.algebra(), J));
}

BlockOperator PartialPermutation::dense() const {
  BlockOperator out(algebra);
  for (std::size_t b = 0; b < entries.size(); ++b)
    for (auto [r, c] : entries[b])
      out.block(b)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 1.0;
  return out;
}

PartialPermutation include_unit(const Embedding& emb, const LocalAlgebra& to,
                                std::size_t source_block, std::size_t row, std::size_t col) {
  PartialPermutation out{to, {}};
  out.entries.resize(emb.groups.size());
  for (std::size_t b = 0; b < emb.groups.size(); ++b)
    for (const auto& grp : emb.groups[b])
      if (grp.source_block == source_block) out.entries[b].emplace_back(grp.target[row], grp.target[col]);
  return out;
}

TraceData compute_trace_data(const Graph& g) {
  const auto t = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd n(t, t);
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < t; ++j)
      n(i, j) = static_cast<double>(g.multiplicity(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  // power iteration on 1 + N, primitive whenever N is irreducible
  const Eigen::MatrixXd shifted = n + Eigen::MatrixXd::Identity(t, t);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(t) / std::sqrt(static_cast<double>(t));
  Eigen::VectorXd u = v;
  for (int it = 0; it < 200000; ++it) {
    Eigen::VectorXd v2 = shifted * v;
    Eigen::VectorXd u2 = shifted.transpose() * u;
    v2.normalize();
    u2.normalize();
    const double change = (v2 - v).norm() + (u2 - u).norm();
    v = v2;
    u = u2;
    if (change < 1e-15) break;
  }
  if (v.minCoeff() <= 0.0 || u.minCoeff() <= 0.0)
    throw DomainError("trace degenerate: Perron-Frobenius vectors are not strictly positive");
  const double lambda = u.dot(n * v) / u.dot(v);
  u /= u.dot(v);

  TraceData td;
  td.eigenvalue = lambda;
  td.left.assign(u.data(), u.data() + t);
  td.right.assign(v.data(), v.data() + t);
  td.left_residual = (n.transpose() * u - lambda * u).norm();
  td.right_residual = (n * v - lambda * v).norm();
  td.asymmetric = (u.normalized() - v.normalized()).norm() > 1e-10;
  return td;
}

std::vector<double> markov_weights(const LocalAlgebra& algebra, const TraceData& td) {
  const std::size_t t = algebra.vertex_count();
  if (td.left.size() != t || td.right.size() != t)
    throw ShapeMismatch("trace data does not match the graph");
  const double scale = std::pow(td.eigenvalue, -static_cast<double>(algebra.support().length())) /
                       static_cast<double>(algebra.ancilla_dim());
  std::vector<double> w(t * t);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j) w[i * t + j] = scale * td.left[i] * td.right[j];
  return w;
}

cplx markov_trace(const BlockOperator& f, const TraceData& td) {
  const auto w = markov_weights(f.algebra(), td);
  cplx total = 0.0;
  for (std::size_t b = 0; b < w.size(); ++b) total += w[b] * f.block(b).trace();
  return total;
}

BlockOperator random_operator(const LocalAlgebra& algebra, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  BlockOperator out(algebra);
  for (std::size_t b = 0; b < algebra.block_count(); ++b) {
    auto& m = out.block(b);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = cplx(normal(rng), normal(rng));
  }
  return out;
}

BlockOperator random_dyadic_operator(const LocalAlgebra& algebra, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(-8, 8);
  BlockOperator out(algebra);
  for (std::size_t b = 0; b < algebra.block_count(); ++b) {
    auto& m = out.block(b);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = cplx(pick(rng) / 8.0, pick(rng) / 8.0);
  }
  return out;
}

}  // namespace stabnet
