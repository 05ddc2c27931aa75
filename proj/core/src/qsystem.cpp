#include "stabnet/qsystem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stabnet/errors.hpp"

namespace stabnet {

namespace {

using cplx = std::complex<double>;

// Entry of a morphism between wires of simple strands whose hom space at `c` is one-dimensional.
cplx scalar_at(const Morphism& f, Label c) {
  const auto& b = f.blocks[c];
  if (b.rows() != 1 || b.cols() != 1) throw Error("expected a one-dimensional hom space");
  return b(0, 0);
}

// Identity-like map [L] ++ [1] -> [1] ++ [L] that only relabels basis trees.
Morphism unit_swap(const DiagramEngine& eng, const Strand& L, const Wire& w) {
  const Wire dom = concat(Wire{L}, w);
  const Wire cod = concat(w, Wire{L});
  Morphism out = eng.zero(dom, cod);
  const auto& bd = eng.basis(dom);
  const auto& bc = eng.basis(cod);
  const Label u = eng.data().unit();
  for (Label c = 0; c < eng.data().rank(); ++c)
    for (std::size_t col = 0; col < bd.count(c); ++col) {
      const auto& st = bd.states(c)[col];
      std::vector<std::size_t> choice(w.size(), 0);
      choice.push_back(st.choice[0]);
      std::vector<Label> chain(w.size(), u);
      chain.push_back(c);
      out.blocks[c](static_cast<Eigen::Index>(bc.index(c, choice, chain)), static_cast<Eigen::Index>(col)) = 1.0;
    }
  return out;
}

bool is_unit_wire(const FusionData& fd, const Wire& w) {
  return std::all_of(w.begin(), w.end(), [&](const Strand& s) { return s.summands == std::vector<Label>{fd.unit()}; });
}

// sigma for the pair blocks Y -> Z: [Y, dual Y] ++ W -> W ++ [Z, dual Z].
Morphism pair_braiding(const DiagramEngine& eng, Label Y, Label Z, const Wire& w) {
  const auto& fd = eng.data();
  const Label Yd = fd.dual(Y), Zd = fd.dual(Z);
  const Wire wz = concat(w, simple_wire({Z}));
  Morphism sigma = eng.zero(concat(simple_wire({Y, Yd}), w), concat(w, simple_wire({Z, Zd})));
  const auto& basis = eng.basis(wz);
  const double coef = std::sqrt(fd.dim(Z) / fd.dim(Y));
  for (std::size_t idx = 0; idx < basis.count(Y); ++idx) {
    const Morphism alpha = eng.tree(wz, Y, idx);
    const Wire ydw = concat(simple_wire({Yd}), w);
    const Morphism up = eng.apply_local(eng.coev(Z), ydw, 1 + w.size());
    const Morphism contract =
        eng.apply_local(eng.adjoint(alpha), concat(ydw, simple_wire({Z, Zd})), 1);
    const Morphism cap = eng.apply_local(eng.ev(Y), simple_wire({Yd, Y, Zd}), 0);
    const Morphism rotated = eng.compose(cap, eng.compose(contract, up));
    sigma = eng.add(sigma, eng.scale(eng.tensor(alpha, rotated), coef));
  }
  return sigma;
}

std::size_t require_pairs(const AlgebraObject& q) {
  if (q.origin.size() != q.size()) throw InputError("half-braiding needs an algebra built from pairs X (x) dual X");
  return q.size();
}

}  // namespace

AlgebraObject build_lagrangian_qsystem(const FusionData& fd, const std::vector<Label>& module_labels) {
  if (module_labels.empty()) throw InputError("no module labels");
  AlgebraObject q;
  q.module_labels = module_labels;
  q.dim_e = 0.0;
  for (Label x : module_labels) {
    if (x >= fd.rank()) throw InputError("module label out of range");
    if (std::count(module_labels.begin(), module_labels.end(), x) > 1) throw InputError("repeated module label");
    q.dim_e += fd.dim(x) * fd.dim(x);
    for (Label c : fd.fuse(x, fd.dual(x))) {
      q.summands.push_back(c);
      q.origin.emplace_back(x, c);
    }
  }
  const std::size_t n = q.size();
  const DiagramEngine eng(fd);
  q.multiplication.assign(n * n * n, 0.0);
  q.unit.assign(n, 0.0);

  std::map<Label, Morphism> mult_x;
  for (Label x : module_labels) {
    const Label xd = fd.dual(x);
    mult_x.emplace(x, eng.scale(eng.apply_local(eng.ev(x), simple_wire({x, xd, x, xd}), 1),
                                std::sqrt(q.dim_e / fd.dim(x))));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const auto [x, ci] = q.origin[i];
        if (q.origin[j].first != x || q.origin[k].first != x) continue;
        const Label cj = q.origin[j].second, ck = q.origin[k].second;
        if (!fd.admissible(ci, cj, ck)) continue;
        const Label xd = fd.dual(x);
        const Morphism in = eng.tensor(eng.splitting(x, xd, ci), eng.splitting(x, xd, cj));
        const Morphism f = eng.compose(eng.vertex(x, xd, ck), eng.compose(mult_x.at(x), in));
        q.multiplication[(i * n + j) * n + k] = scalar_at(f, ck);
      }
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x, c] = q.origin[i];
    if (c != fd.unit()) continue;
    const Morphism iota = eng.scale(eng.coev(x), std::sqrt(fd.dim(x) / q.dim_e));
    q.unit[i] = scalar_at(eng.compose(eng.vertex(x, fd.dual(x), c), iota), fd.unit());
  }
  return q;
}

AlgebraObject regular_algebra(const FusionData& fd) {
  AlgebraObject q;
  const std::size_t n = fd.rank();
  for (Label g = 0; g < n; ++g) {
    if (fd.fuse(g, fd.dual(g)).size() != 1) throw InputError("regular algebra needs invertible labels");
    q.summands.push_back(g);
    q.module_labels.push_back(g);
  }
  q.dim_e = static_cast<double>(n);
  q.multiplication.assign(n * n * n, 0.0);
  q.unit.assign(n, 0.0);
  for (Label g = 0; g < n; ++g)
    for (Label h = 0; h < n; ++h) q.multiplication[(g * n + h) * n + fd.fuse(g, h).front()] = 1.0;
  q.unit[fd.unit()] = 1.0;
  return q;
}

Morphism multiplication_morphism(const DiagramEngine& eng, const AlgebraObject& q) {
  const Strand L = q.strand();
  Morphism m = eng.zero(Wire{L, L}, Wire{L});
  const auto& bd = eng.basis(m.dom);
  const auto& bc = eng.basis(m.cod);
  for (Label c = 0; c < eng.data().rank(); ++c)
    for (std::size_t col = 0; col < bd.count(c); ++col) {
      const auto& st = bd.states(c)[col];
      for (std::size_t k = 0; k < q.size(); ++k) {
        if (q.summands[k] != c) continue;
        const cplx v = q.m(st.choice[0], st.choice[1], k);
        if (v == cplx(0.0)) continue;
        m.blocks[c](static_cast<Eigen::Index>(bc.index(c, {k}, {c})), static_cast<Eigen::Index>(col)) = v;
      }
    }
  return m;
}

Morphism unit_morphism(const DiagramEngine& eng, const AlgebraObject& q) {
  const Strand L = q.strand();
  const Label u = eng.data().unit();
  Morphism iota = eng.zero({}, Wire{L});
  const auto& bc = eng.basis(iota.cod);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q.summands[i] == u) iota.blocks[u](static_cast<Eigen::Index>(bc.index(u, {i}, {u})), 0) = q.unit[i];
  return iota;
}

std::vector<std::pair<std::string, double>> QSystemReport::residuals() const {
  return {{"associativity", associativity}, {"left_unit", left_unit},         {"right_unit", right_unit},
          {"frobenius_left", frobenius_left}, {"frobenius_right", frobenius_right}, {"special", special},
          {"unit_norm", unit_norm}};
}

QSystemReport verify_qsystem(const AlgebraObject& q, const FusionData& fd, double tol) {
  const std::size_t n = q.size();
  if (q.multiplication.size() != n * n * n || q.unit.size() != n) throw ShapeMismatch("algebra tensors have the wrong size");
  for (Label s : q.summands)
    if (s >= fd.rank()) throw ShapeMismatch("algebra summand outside the label set");
  const DiagramEngine eng(fd);
  const Strand L = q.strand();
  const Wire L1{L}, L2{L, L}, L3{L, L, L};
  const Morphism m = multiplication_morphism(eng, q);
  const Morphism md = eng.adjoint(m);
  const Morphism iota = unit_morphism(eng, q);

  QSystemReport r;
  r.associativity = eng.residual(eng.compose(m, eng.apply_local(m, L3, 0)), eng.compose(m, eng.apply_local(m, L3, 1)));
  const Morphism id = eng.identity(L1);
  r.left_unit = eng.residual(eng.compose(m, eng.apply_local(iota, L1, 0)), id);
  r.right_unit = eng.residual(eng.compose(m, eng.apply_local(iota, L1, 1)), id);
  const Morphism mdm = eng.compose(md, m);
  r.frobenius_left = eng.residual(eng.compose(eng.apply_local(m, L3, 1), eng.apply_local(md, L2, 0)), mdm);
  r.frobenius_right = eng.residual(eng.compose(eng.apply_local(m, L3, 0), eng.apply_local(md, L2, 1)), mdm);
  r.special = eng.residual(eng.compose(m, md), eng.scale(id, q.dim_e));
  r.unit_norm = eng.residual(eng.compose(eng.adjoint(iota), iota), eng.identity({}));
  double worst = 0.0;
  for (const auto& [name, v] : r.residuals()) worst = std::max(worst, v);
  r.pass = worst <= tol;
  return r;
}

namespace {

Morphism braiding_formula(const DiagramEngine& eng, const AlgebraObject& q, const Wire& w) {
  const std::size_t n = require_pairs(q);
  const auto& fd = eng.data();
  const Strand L = q.strand();

  const Wire dom = concat(Wire{L}, w);
  const Wire cod = concat(w, Wire{L});
  Morphism sigma = eng.zero(dom, cod);
  std::map<std::pair<Label, Label>, Morphism> blocks;
  for (Label y : q.module_labels)
    for (Label z : q.module_labels) blocks.emplace(std::make_pair(y, z), pair_braiding(eng, y, z, w));

  for (std::size_t i = 0; i < n; ++i) {
    const auto [y, ci] = q.origin[i];
    const Morphism project = eng.apply_local(eng.adjoint(eng.summand_inclusion(L, i)), dom, 0);
    const Wire ciw = concat(simple_wire({ci}), w);
    const Morphism split_in = eng.apply_local(eng.splitting(y, fd.dual(y), ci), ciw, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto [z, ck] = q.origin[k];
      const Morphism& s = blocks.at({y, z});
      const Morphism fuse_out = eng.apply_local(eng.vertex(z, fd.dual(z), ck), s.cod, w.size());
      const Morphism include = eng.apply_local(eng.summand_inclusion(L, k), fuse_out.cod, w.size());
      const Morphism piece =
          eng.compose(include, eng.compose(fuse_out, eng.compose(s, eng.compose(split_in, project))));
      sigma = eng.add(sigma, piece);
    }
  }
  return sigma;
}

}  // namespace

Morphism half_braiding(const DiagramEngine& eng, const AlgebraObject& q, const Wire& w) {
  require_pairs(q);
  if (is_unit_wire(eng.data(), w)) {
    const Strand L = q.strand();
    return w.empty() ? eng.identity(Wire{L}) : unit_swap(eng, L, w);
  }
  return braiding_formula(eng, q, w);
}

Morphism half_braiding(const DiagramEngine& eng, const AlgebraObject& q, Label w) {
  if (w >= eng.data().rank()) throw InputError("half-braiding label out of range");
  return half_braiding(eng, q, simple_wire({w}));
}

std::vector<std::pair<std::string, double>> HalfBraidingReport::residuals() const {
  return {{"unitarity", unitarity},
          {"hexagon", hexagon},
          {"multiplication", multiplication},
          {"unit", unit},
          {"unit_label", unit_label}};
}

HalfBraidingReport verify_half_braiding(const FusionData& fd, const AlgebraObject& q, double tol) {
  require_pairs(q);
  const DiagramEngine eng(fd);
  const Strand L = q.strand();
  const Morphism m = multiplication_morphism(eng, q);
  const Morphism iota = unit_morphism(eng, q);
  HalfBraidingReport r;

  std::vector<Morphism> sigma;
  for (Label a = 0; a < fd.rank(); ++a) sigma.push_back(half_braiding(eng, q, a));

  for (Label a = 0; a < fd.rank(); ++a) {
    const Morphism& s = sigma[a];
    const Wire W = simple_wire({a});
    r.unitarity = std::max(r.unitarity, eng.residual(eng.compose(eng.adjoint(s), s), eng.identity(s.dom)));
    r.unitarity = std::max(r.unitarity, eng.residual(eng.compose(s, eng.adjoint(s)), eng.identity(s.cod)));

    const Wire llw = concat(Wire{L, L}, W);
    const Morphism lhs = eng.compose(s, eng.apply_local(m, llw, 0));
    const Morphism step1 = eng.apply_local(s, llw, 1);
    const Morphism step2 = eng.apply_local(s, step1.cod, 0);
    const Morphism step3 = eng.apply_local(m, step2.cod, 1);
    r.multiplication = std::max(r.multiplication, eng.residual(lhs, eng.compose(step3, eng.compose(step2, step1))));

    r.unit = std::max(r.unit, eng.residual(eng.compose(s, eng.apply_local(iota, W, 0)), eng.apply_local(iota, W, 1)));

    for (Label b = 0; b < fd.rank(); ++b) {
      const Morphism whole = half_braiding(eng, q, simple_wire({a, b}));
      const Morphism first = eng.apply_local(s, concat(concat(Wire{L}, W), simple_wire({b})), 0);
      const Morphism second = eng.apply_local(sigma[b], first.cod, 1);
      r.hexagon = std::max(r.hexagon, eng.residual(whole, eng.compose(second, first)));
    }
  }
  const Wire one = simple_wire({fd.unit()});
  r.unit_label = eng.residual(braiding_formula(eng, q, one), unit_swap(eng, L, one));

  double worst = 0.0;
  for (const auto& [name, v] : r.residuals()) worst = std::max(worst, v);
  r.pass = worst <= tol;
  return r;
}

}  // namespace stabnet
