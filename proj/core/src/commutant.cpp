#include <map>
#include <vector>

#include <Eigen/Sparse>

#include "stabnet/errors.hpp"
#include "stabnet/haag.hpp"
#include "stabnet/linalg.hpp"

namespace stabnet {

namespace {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

struct Entry {
  Index row;
  Index col;
  cplx value;
};

std::vector<Entry> nonzeros(const Matrix& m) {
  std::vector<Entry> out;
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != cplx(0.0)) out.push_back({r, c, m(r, c)});
  return out;
}

// Solves x g = g x for all g in one block of dimension d. Returns basis columns in
// the coordinates of the colored positions `cells`.
std::vector<Matrix> block_commutant(Index d, const std::vector<const Matrix*>& gens, double rel_cutoff) {
  std::vector<std::vector<Entry>> off_diagonal;
  // color[p] lists, per diagonal generator, the class of its p-th diagonal value;
  // values within rel_cutoff of each other (relative to the generator) share a class
  std::vector<std::vector<int>> color(static_cast<std::size_t>(d));
  for (const Matrix* g : gens) {
    auto nz = nonzeros(*g);
    if (nz.empty()) continue;
    bool diagonal = true;
    for (const auto& e : nz) diagonal = diagonal && e.row == e.col;
    if (diagonal) {
      const double eps = rel_cutoff * g->cwiseAbs().maxCoeff();
      std::vector<cplx> reps;
      for (Index p = 0; p < d; ++p) {
        const cplx v = (*g)(p, p);
        std::size_t k = 0;
        while (k < reps.size() && std::abs(reps[k] - v) > eps) ++k;
        if (k == reps.size()) reps.push_back(v);
        color[static_cast<std::size_t>(p)].push_back(static_cast<int>(k));
      }
    } else {
      off_diagonal.push_back(std::move(nz));
    }
  }

  // positions (p, q) with different diagonal signatures are forced to zero
  std::map<std::vector<int>, int> color_ids;
  std::vector<int> color_of(static_cast<std::size_t>(d));
  for (Index p = 0; p < d; ++p) {
    auto it = color_ids.emplace(color[static_cast<std::size_t>(p)], static_cast<int>(color_ids.size())).first;
    color_of[static_cast<std::size_t>(p)] = it->second;
  }
  std::vector<std::pair<Index, Index>> cells;
  Eigen::MatrixXi cell_index = Eigen::MatrixXi::Constant(d, d, -1);
  for (Index q = 0; q < d; ++q)
    for (Index p = 0; p < d; ++p)
      if (color_of[static_cast<std::size_t>(p)] == color_of[static_cast<std::size_t>(q)]) {
        cell_index(p, q) = static_cast<int>(cells.size());
        cells.emplace_back(p, q);
      }
  const auto n_cells = static_cast<Index>(cells.size());

  Matrix basis;  // n_cells x r; empty means the identity (nothing imposed yet)
  bool identity_basis = true;
  for (const auto& g : off_diagonal) {
    // constraint map e_pq -> e_pq g - g e_pq, rows indexed by touched positions
    std::vector<std::vector<Entry>> by_row(static_cast<std::size_t>(d));
    std::vector<std::vector<Entry>> by_col(static_cast<std::size_t>(d));
    for (const auto& e : g) {
      by_row[static_cast<std::size_t>(e.row)].push_back(e);
      by_col[static_cast<std::size_t>(e.col)].push_back(e);
    }
    std::vector<int> row_of(static_cast<std::size_t>(d * d), -1);
    int n_rows = 0;
    auto row_id = [&](Index r, Index c) {
      auto& slot = row_of[static_cast<std::size_t>(r * d + c)];
      if (slot < 0) slot = n_rows++;
      return slot;
    };
    std::vector<Triplet> trips;
    for (Index u = 0; u < n_cells; ++u) {
      const auto [p, q] = cells[static_cast<std::size_t>(u)];
      for (const auto& e : by_row[static_cast<std::size_t>(q)]) trips.emplace_back(row_id(p, e.col), u, e.value);
      for (const auto& e : by_col[static_cast<std::size_t>(p)]) trips.emplace_back(row_id(e.row, q), u, -e.value);
    }
    SparseMatrix c(n_rows, n_cells);
    c.setFromTriplets(trips.begin(), trips.end());
    c.prune(cplx(0.0));
    if (c.nonZeros() == 0) continue;
    Matrix m = identity_basis ? Matrix(c) : Matrix(c * basis);
    if (m.cwiseAbs().maxCoeff() == 0.0) continue;
    // scale by the unrestricted map: a restriction that vanishes up to roundoff has no rank
    Matrix kernel = linalg::null_space(m, rel_cutoff, c.norm());
    basis = identity_basis ? kernel : Matrix(basis * kernel);
    identity_basis = false;
    if (basis.cols() == 0) break;
  }
  if (identity_basis) basis = Matrix::Identity(n_cells, n_cells);

  std::vector<Matrix> out;
  for (Index k = 0; k < basis.cols(); ++k) {
    Matrix x = Matrix::Zero(d, d);
    for (Index u = 0; u < n_cells; ++u) {
      const auto [p, q] = cells[static_cast<std::size_t>(u)];
      x(p, q) = basis(u, k);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

std::vector<BlockOperator> commutant(const std::vector<BlockOperator>& generators,
                                     const LocalAlgebra& ambient, double rel_cutoff) {
  for (const auto& g : generators)
    if (!(g.algebra() == ambient)) throw ShapeMismatch("generator does not live in the ambient algebra");
  std::vector<BlockOperator> out;
  for (std::size_t b = 0; b < ambient.block_count(); ++b) {
    const auto d = static_cast<Index>(ambient.block_dim(b / ambient.vertex_count(), b % ambient.vertex_count()));
    if (d == 0) continue;
    std::vector<const Matrix*> blocks;
    for (const auto& g : generators) blocks.push_back(&g.block(b));
    for (auto& x : block_commutant(d, blocks, rel_cutoff)) {
      BlockOperator op(ambient);
      op.block(b) = std::move(x);
      out.push_back(std::move(op));
    }
  }
  return out;
}

std::vector<PartialPermutation> unit_commutant(const std::vector<PartialPermutation>& generators,
                                               const LocalAlgebra& ambient) {
  for (const auto& g : generators)
    if (!(g.algebra == ambient)) throw ShapeMismatch("generator does not live in the ambient algebra");
  std::vector<PartialPermutation> out;
  const std::size_t t = ambient.vertex_count();
  for (std::size_t b = 0; b < ambient.block_count(); ++b) {
    const std::size_t d = ambient.block_dim(b / t, b % t);
    if (d == 0) continue;
    // union-find over positions p * d + q, with a root flag for classes forced to zero
    std::vector<std::size_t> parent(d * d);
    std::vector<char> zero(d * d, 0);
    for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = k;
    auto find = [&](std::size_t k) {
      while (parent[k] != k) k = parent[k] = parent[parent[k]];
      return k;
    };
    auto unite = [&](std::size_t a, std::size_t c) {
      a = find(a);
      c = find(c);
      if (a == c) return;
      parent[a] = c;
      zero[c] = static_cast<char>(zero[c] | zero[a]);
    };
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    for (const auto& g : generators) {
      const auto& e = g.entries[b];
      if (e.empty()) continue;
      std::vector<std::size_t> row_to_col(d, kNone), col_to_row(d, kNone);
      for (auto [r, c] : e) {
        if (row_to_col[r] != kNone || col_to_row[c] != kNone)
          throw InputError("generator is not a partial permutation");
        row_to_col[r] = c;
        col_to_row[c] = r;
      }
      // (x g)_{p,c} = x_{p, col_to_row[c]}, (g x)_{p,c} = x_{row_to_col[p], c}
      auto equate = [&](std::size_t p, std::size_t c) {
        const bool left = col_to_row[c] != kNone, right = row_to_col[p] != kNone;
        if (left && right) {
          unite(p * d + col_to_row[c], row_to_col[p] * d + c);
        } else if (left) {
          zero[find(p * d + col_to_row[c])] = 1;
        } else if (right) {
          zero[find(row_to_col[p] * d + c)] = 1;
        }
      };
      for (auto [r, c] : e)
        for (std::size_t p = 0; p < d; ++p) equate(p, c);
      for (auto [r, c] : e)
        for (std::size_t q = 0; q < d; ++q)
          if (col_to_row[q] == kNone) equate(r, q);
    }
    std::map<std::size_t, std::size_t> class_of_root;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> classes;
    for (std::size_t k = 0; k < d * d; ++k) {
      const std::size_t root = find(k);
      if (zero[root]) continue;
      auto [it, fresh] = class_of_root.emplace(root, classes.size());
      if (fresh) classes.emplace_back();
      classes[it->second].emplace_back(k / d, k % d);
    }
    for (auto& cls : classes) {
      PartialPermutation p{ambient, std::vector<std::vector<std::pair<std::size_t, std::size_t>>>(ambient.block_count())};
      p.entries[b] = std::move(cls);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<PartialPermutation> interval_generators(const LocalAlgebra& algebra) {
  std::vector<PartialPermutation> out;
  const std::size_t t = algebra.vertex_count();
  auto unit = [&](std::size_t b, std::size_t r, std::size_t c) {
    PartialPermutation p{algebra, std::vector<std::vector<std::pair<std::size_t, std::size_t>>>(t * t)};
    p.entries[b].emplace_back(r, c);
    out.push_back(std::move(p));
  };
  for (std::size_t b = 0; b < t * t; ++b) {
    const std::size_t d = algebra.block_dim(b / t, b % t);
    for (std::size_t p = 0; p < d; ++p) unit(b, p, p);
    for (std::size_t p = 0; p + 1 < d; ++p) {
      unit(b, p, p + 1);
      unit(b, p + 1, p);
    }
  }
  return out;
}

std::vector<PartialPermutation> included_interval_generators(const LocalAlgebra& from,
                                                             const LocalAlgebra& target) {
  const Embedding emb = embedding(from, target);
  std::vector<PartialPermutation> out;
  for (const auto& gen : interval_generators(from))
    for (std::size_t b = 0; b < gen.entries.size(); ++b)
      for (auto [r, c] : gen.entries[b]) out.push_back(include_unit(emb, target, b, r, c));
  return out;
}

}  // namespace stabnet
