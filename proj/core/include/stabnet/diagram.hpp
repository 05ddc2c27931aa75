#pragma once

// Morphisms between tensor products of (direct sums of) simple objects,
// stored as matrices on left-associated splitting trees, one matrix per
// total charge.
//
// A wire is a list of strands; a strand is a direct sum of simples, possibly
// with repeated labels. A basis state picks one summand per strand and a
// chain x_1 = s_1, x_{j+1} in x_j (x) s_{j+1}; the last entry is the charge.
// A morphism f: W -> W' is given by f o b_u = sum_v M_c[v, u] b'_v.

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "stabnet/fusion.hpp"

namespace stabnet {

struct Strand {
  std::vector<Label> summands;
  friend bool operator==(const Strand&, const Strand&) = default;
  friend auto operator<=>(const Strand&, const Strand&) = default;
};

using Wire = std::vector<Strand>;

Strand simple_strand(Label a);
Wire simple_wire(std::initializer_list<Label> labels);
Wire concat(const Wire& a, const Wire& b);

struct WireState {
  std::vector<std::size_t> choice;  // summand index per strand
  std::vector<Label> chain;         // empty for the empty wire
};

class WireBasis {
 public:
  WireBasis(const FusionData& fd, const Wire& wire);

  const Wire& wire() const { return wire_; }
  /// States with total charge c, in a fixed order.
  const std::vector<WireState>& states(Label c) const { return states_[c]; }
  std::size_t count(Label c) const { return states_[c].size(); }
  /// Index of a state within its charge sector; throws if absent.
  std::size_t index(Label c, const std::vector<std::size_t>& choice, const std::vector<Label>& chain) const;

 private:
  Wire wire_;
  std::vector<std::vector<WireState>> states_;
  std::vector<std::map<std::pair<std::vector<std::size_t>, std::vector<Label>>, std::size_t>> lookup_;
};

struct Morphism {
  Wire dom;
  Wire cod;
  std::vector<Eigen::MatrixXcd> blocks;  // indexed by charge; rows cod states, cols dom states
};

class DiagramEngine {
 public:
  explicit DiagramEngine(const FusionData& fd);

  const FusionData& data() const { return fd_; }
  const WireBasis& basis(const Wire& w) const;

  Morphism zero(const Wire& dom, const Wire& cod) const;
  Morphism identity(const Wire& w) const;
  /// f o g.
  Morphism compose(const Morphism& f, const Morphism& g) const;
  Morphism adjoint(const Morphism& f) const;
  Morphism add(const Morphism& f, const Morphism& g) const;
  Morphism scale(const Morphism& f, std::complex<double> s) const;
  /// max |f - g| over matrix entries.
  double residual(const Morphism& f, const Morphism& g) const;

  /// id_P (x) op (x) id_S on w = P ++ op.dom ++ S with |P| = pos.
  Morphism apply_local(const Morphism& op, const Wire& w, std::size_t pos) const;
  Morphism tensor(const Morphism& f, const Morphism& g) const;

  /// [c] -> [a, b], the isometric splitting vertex.
  Morphism splitting(Label a, Label b, Label c) const;
  /// [a, b] -> [c].
  Morphism vertex(Label a, Label b, Label c) const;
  /// [] -> [X, dual X], norm^2 = d_X.
  Morphism coev(Label x) const;
  /// [dual X, X] -> [], normalized so that (1 (x) ev)(coev (x) 1) = 1_X.
  Morphism ev(Label x) const;
  /// [s_i] -> [s], inclusion of the i-th summand.
  Morphism summand_inclusion(const Strand& s, std::size_t i) const;
  /// [c] -> w, the basis tree with the given index in charge sector c.
  Morphism tree(const Wire& w, Label c, std::size_t index) const;

 private:
  const FusionData& fd_;
  mutable std::map<Wire, WireBasis> bases_;
  mutable std::map<Label, std::complex<double>> ev_phase_;

  void require_dom(const Morphism& f, const Wire& w) const;
};

}  // namespace stabnet
