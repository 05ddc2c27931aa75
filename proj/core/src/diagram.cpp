#include "stabnet/diagram.hpp"

#include <cmath>

#include "stabnet/errors.hpp"

namespace stabnet {

namespace {

using cplx = std::complex<double>;

struct Term {
  std::vector<Label> chain;
  cplx coef;
};

// Re-expresses the left-associated tree (((a s_1)_{x_1} s_2)_{x_2} ...) as
// sum_y coef (a (((s_1 s_2)_{y_2} ...)_{y_k}))_{x_k}.
std::vector<Term> to_grouped(const FusionData& fd, Label a, const std::vector<Label>& s,
                             const std::vector<Label>& x) {
  if (s.empty()) return {Term{{}, 1.0}};
  std::vector<Term> cur{Term{{s[0]}, 1.0}};
  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    std::vector<Term> next;
    for (const auto& t : cur) {
      const Label y = t.chain.back();
      for (Label y2 : fd.fuse(y, s[j + 1])) {
        const cplx f = fd.F(a, y, s[j + 1], x[j + 1], x[j], y2);
        if (f == cplx(0.0)) continue;
        Term n = t;
        n.chain.push_back(y2);
        n.coef *= f;
        next.push_back(std::move(n));
      }
    }
    cur = std::move(next);
  }
  return cur;
}

// All chains x with x_1 in a (x) s_1, x_{j+1} in x_j (x) s_{j+1}, ending at c.
void chains_from(const FusionData& fd, Label a, const std::vector<Label>& s, Label c, std::vector<Label>& cur,
                 std::vector<std::vector<Label>>& out) {
  const std::size_t j = cur.size();
  if (j == s.size()) {
    if ((s.empty() ? a : cur.back()) == c) out.push_back(cur);
    return;
  }
  const Label prev = j == 0 ? a : cur.back();
  for (Label x : fd.fuse(prev, s[j])) {
    cur.push_back(x);
    chains_from(fd, a, s, c, cur, out);
    cur.pop_back();
  }
}

std::vector<Label> labels_of(const Wire& w, const std::vector<std::size_t>& choice, std::size_t from,
                             std::size_t len) {
  std::vector<Label> out(len);
  for (std::size_t j = 0; j < len; ++j) out[j] = w[from + j].summands[choice[from + j]];
  return out;
}

}  // namespace

Strand simple_strand(Label a) { return Strand{{a}}; }

Wire simple_wire(std::initializer_list<Label> labels) {
  Wire w;
  for (Label a : labels) w.push_back(simple_strand(a));
  return w;
}

Wire concat(const Wire& a, const Wire& b) {
  Wire w = a;
  w.insert(w.end(), b.begin(), b.end());
  return w;
}

WireBasis::WireBasis(const FusionData& fd, const Wire& wire)
    : wire_(wire), states_(fd.rank()), lookup_(fd.rank()) {
  std::vector<WireState> cur{WireState{}};
  for (const auto& strand : wire) {
    if (strand.summands.empty()) throw InputError("strand without summands");
    std::vector<WireState> next;
    for (const auto& st : cur)
      for (std::size_t i = 0; i < strand.summands.size(); ++i) {
        const Label s = strand.summands[i];
        const std::vector<Label> xs = st.chain.empty() ? std::vector<Label>{s} : fd.fuse(st.chain.back(), s);
        for (Label x : xs) {
          WireState n = st;
          n.choice.push_back(i);
          n.chain.push_back(x);
          next.push_back(std::move(n));
        }
      }
    cur = std::move(next);
  }
  for (auto& st : cur) {
    const Label c = st.chain.empty() ? fd.unit() : st.chain.back();
    lookup_[c][{st.choice, st.chain}] = states_[c].size();
    states_[c].push_back(std::move(st));
  }
}

std::size_t WireBasis::index(Label c, const std::vector<std::size_t>& choice, const std::vector<Label>& chain) const {
  auto it = lookup_[c].find({choice, chain});
  if (it == lookup_[c].end()) throw Error("tree state not in wire basis");
  return it->second;
}

DiagramEngine::DiagramEngine(const FusionData& fd) : fd_(fd) {}

const WireBasis& DiagramEngine::basis(const Wire& w) const {
  auto it = bases_.find(w);
  if (it == bases_.end()) it = bases_.emplace(w, WireBasis(fd_, w)).first;
  return it->second;
}

Morphism DiagramEngine::zero(const Wire& dom, const Wire& cod) const {
  Morphism m{dom, cod, {}};
  const auto& bd = basis(dom);
  const auto& bc = basis(cod);
  for (Label c = 0; c < fd_.rank(); ++c)
    m.blocks.push_back(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(bc.count(c)),
                                              static_cast<Eigen::Index>(bd.count(c))));
  return m;
}

Morphism DiagramEngine::identity(const Wire& w) const {
  Morphism m = zero(w, w);
  for (auto& b : m.blocks) b.setIdentity();
  return m;
}

void DiagramEngine::require_dom(const Morphism& f, const Wire& w) const {
  if (f.dom != w) throw ShapeMismatch("morphism domain does not match");
}

Morphism DiagramEngine::compose(const Morphism& f, const Morphism& g) const {
  require_dom(f, g.cod);
  Morphism m{g.dom, f.cod, {}};
  for (Label c = 0; c < fd_.rank(); ++c) m.blocks.push_back(f.blocks[c] * g.blocks[c]);
  return m;
}

Morphism DiagramEngine::adjoint(const Morphism& f) const {
  Morphism m{f.cod, f.dom, {}};
  for (const auto& b : f.blocks) m.blocks.push_back(b.adjoint());
  return m;
}

Morphism DiagramEngine::add(const Morphism& f, const Morphism& g) const {
  if (f.dom != g.dom || f.cod != g.cod) throw ShapeMismatch("adding morphisms between different wires");
  Morphism m = f;
  for (std::size_t c = 0; c < m.blocks.size(); ++c) m.blocks[c] += g.blocks[c];
  return m;
}

Morphism DiagramEngine::scale(const Morphism& f, std::complex<double> s) const {
  Morphism m = f;
  for (auto& b : m.blocks) b *= s;
  return m;
}

double DiagramEngine::residual(const Morphism& f, const Morphism& g) const {
  if (f.dom != g.dom || f.cod != g.cod) throw ShapeMismatch("comparing morphisms between different wires");
  double r = 0.0;
  for (std::size_t c = 0; c < f.blocks.size(); ++c)
    if (f.blocks[c].size() > 0) r = std::max(r, (f.blocks[c] - g.blocks[c]).cwiseAbs().maxCoeff());
  return r;
}

Morphism DiagramEngine::apply_local(const Morphism& op, const Wire& w, std::size_t pos) const {
  const std::size_t k = op.dom.size();
  const std::size_t k2 = op.cod.size();
  if (pos + k > w.size() || !std::equal(op.dom.begin(), op.dom.end(), w.begin() + static_cast<long>(pos)))
    throw ShapeMismatch("local morphism does not match the wire");
  Wire w2(w.begin(), w.begin() + static_cast<long>(pos));
  w2.insert(w2.end(), op.cod.begin(), op.cod.end());
  w2.insert(w2.end(), w.begin() + static_cast<long>(pos + k), w.end());

  const auto& bw = basis(w);
  const auto& bw2 = basis(w2);
  const auto& bu = basis(op.dom);
  const auto& bu2 = basis(op.cod);
  Morphism out = zero(w, w2);

  // (a, c, output choices) -> output chains with their grouped decomposition.
  using Expansion = std::vector<std::pair<std::vector<Label>, std::vector<Term>>>;
  std::map<std::tuple<Label, Label, std::vector<std::size_t>>, Expansion> cache;
  auto expansion = [&](Label a, Label c, const std::vector<std::size_t>& choice2) -> const Expansion& {
    auto key = std::make_tuple(a, c, choice2);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const auto labels = labels_of(op.cod, choice2, 0, k2);
    std::vector<std::vector<Label>> chains;
    std::vector<Label> cur;
    chains_from(fd_, a, labels, c, cur, chains);
    Expansion e;
    for (auto& x : chains) {
      auto terms = to_grouped(fd_, a, labels, x);
      e.emplace_back(std::move(x), std::move(terms));
    }
    return cache.emplace(std::move(key), std::move(e)).first->second;
  };

  for (Label C = 0; C < fd_.rank(); ++C) {
    const auto& states = bw.states(C);
    for (std::size_t col = 0; col < states.size(); ++col) {
      const auto& st = states[col];
      const Label a = pos == 0 ? fd_.unit() : st.chain[pos - 1];
      const Label c = pos + k == 0 ? fd_.unit() : st.chain[pos + k - 1];
      const std::vector<std::size_t> uchoice(st.choice.begin() + static_cast<long>(pos),
                                             st.choice.begin() + static_cast<long>(pos + k));
      const std::vector<Label> xs(st.chain.begin() + static_cast<long>(pos),
                                  st.chain.begin() + static_cast<long>(pos + k));
      for (const auto& t : to_grouped(fd_, a, labels_of(w, st.choice, pos, k), xs)) {
        const Label f = t.chain.empty() ? fd_.unit() : t.chain.back();
        const std::size_t u = bu.index(f, uchoice, t.chain);
        const auto& blk = op.blocks[f];
        for (Eigen::Index v = 0; v < blk.rows(); ++v) {
          const cplx amp = blk(v, static_cast<Eigen::Index>(u)) * t.coef;
          if (amp == cplx(0.0)) continue;
          const auto& target = bu2.states(f)[static_cast<std::size_t>(v)];
          for (const auto& [x2, terms] : expansion(a, c, target.choice)) {
            cplx back = 0.0;
            for (const auto& t2 : terms)
              if (t2.chain == target.chain) back += std::conj(t2.coef);
            if (back == cplx(0.0)) continue;
            std::vector<std::size_t> choice(st.choice.begin(), st.choice.begin() + static_cast<long>(pos));
            choice.insert(choice.end(), target.choice.begin(), target.choice.end());
            choice.insert(choice.end(), st.choice.begin() + static_cast<long>(pos + k), st.choice.end());
            std::vector<Label> chain(st.chain.begin(), st.chain.begin() + static_cast<long>(pos));
            chain.insert(chain.end(), x2.begin(), x2.end());
            chain.insert(chain.end(), st.chain.begin() + static_cast<long>(pos + k), st.chain.end());
            const std::size_t row = bw2.index(C, choice, chain);
            out.blocks[C](static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += amp * back;
          }
        }
      }
    }
  }
  return out;
}

Morphism DiagramEngine::tensor(const Morphism& f, const Morphism& g) const {
  const Morphism right = apply_local(g, concat(f.dom, g.dom), f.dom.size());
  const Morphism left = apply_local(f, concat(f.dom, g.cod), 0);
  return compose(left, right);
}

Morphism DiagramEngine::splitting(Label a, Label b, Label c) const {
  if (!fd_.admissible(a, b, c)) throw DomainError("splitting vertex for an inadmissible triple");
  Morphism m = zero(simple_wire({c}), simple_wire({a, b}));
  const auto row = basis(m.cod).index(c, {0, 0}, {a, c});
  m.blocks[c](static_cast<Eigen::Index>(row), 0) = 1.0;
  return m;
}

Morphism DiagramEngine::vertex(Label a, Label b, Label c) const { return adjoint(splitting(a, b, c)); }

Morphism DiagramEngine::coev(Label x) const {
  Morphism m = zero({}, simple_wire({x, fd_.dual(x)}));
  const auto row = basis(m.cod).index(fd_.unit(), {0, 0}, {x, fd_.unit()});
  m.blocks[fd_.unit()](static_cast<Eigen::Index>(row), 0) = std::sqrt(fd_.dim(x));
  return m;
}

Morphism DiagramEngine::ev(Label x) const {
  const Label xd = fd_.dual(x);
  const Label u = fd_.unit();
  auto raw = [&](cplx phase) {
    Morphism m = zero(simple_wire({xd, x}), {});
    const auto col = basis(m.dom).index(u, {0, 0}, {xd, u});
    m.blocks[u](0, static_cast<Eigen::Index>(col)) = phase * std::sqrt(fd_.dim(x));
    return m;
  };
  auto it = ev_phase_.find(x);
  if (it == ev_phase_.end()) {
    const Morphism up = apply_local(coev(x), simple_wire({x}), 0);
    const Morphism down = apply_local(raw(1.0), simple_wire({x, xd, x}), 1);
    const cplx z = compose(down, up).blocks[x](0, 0);
    if (std::abs(z) < 1e-12) throw DomainError("degenerate zigzag for label " + fd_.name(x));
    it = ev_phase_.emplace(x, 1.0 / z).first;
  }
  return raw(it->second);
}

Morphism DiagramEngine::summand_inclusion(const Strand& s, std::size_t i) const {
  const Label c = s.summands.at(i);
  Morphism m = zero(simple_wire({c}), Wire{s});
  const auto row = basis(m.cod).index(c, {i}, {c});
  m.blocks[c](static_cast<Eigen::Index>(row), 0) = 1.0;
  return m;
}

Morphism DiagramEngine::tree(const Wire& w, Label c, std::size_t index) const {
  Morphism m = zero(simple_wire({c}), w);
  m.blocks[c](static_cast<Eigen::Index>(index), 0) = 1.0;
  return m;
}

}  // namespace stabnet
