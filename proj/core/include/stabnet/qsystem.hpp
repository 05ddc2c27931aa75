#pragma once

// Algebra objects over skeletal fusion data, their Q-system checks and the
// half-braiding of the pair algebra L = (+)_X X (x) dual X.

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "stabnet/diagram.hpp"
#include "stabnet/fusion.hpp"

namespace stabnet {

struct AlgebraObject {
  /// Simple summands in order; labels may repeat.
  std::vector<Label> summands;
  /// (X, c) with c a channel of X (x) dual X, one per summand; empty unless built from pairs.
  std::vector<std::pair<Label, Label>> origin;
  std::vector<Label> module_labels;
  /// sum_X d_X^2 over module_labels (|G| for a regular algebra).
  double dim_e = 1.0;
  /// m[i][j][k], coefficient of the channel s_i s_j -> s_k, flattened row-major.
  std::vector<std::complex<double>> multiplication;
  std::vector<std::complex<double>> unit;

  std::size_t size() const { return summands.size(); }
  Strand strand() const { return Strand{summands}; }
  std::complex<double> m(std::size_t i, std::size_t j, std::size_t k) const {
    return multiplication[(i * size() + j) * size() + k];
  }
};

/// L = (+)_X X (x) dual X with m = sqrt(dim E / d_X) (1 (x) ev_X (x) 1) and
/// iota = sqrt(d_X / dim E) coev_X on each pair, expanded into simple summands.
AlgebraObject build_lagrangian_qsystem(const FusionData& fd, const std::vector<Label>& module_labels);

/// (+)_g g with m(g, h) = 1 for fusion data in which every label is invertible.
AlgebraObject regular_algebra(const FusionData& fd);

/// [L, L] -> [L] and [] -> [L].
Morphism multiplication_morphism(const DiagramEngine& eng, const AlgebraObject& q);
Morphism unit_morphism(const DiagramEngine& eng, const AlgebraObject& q);

struct QSystemReport {
  double associativity = 0.0;
  double left_unit = 0.0;
  double right_unit = 0.0;
  /// (1 (x) m)(m^dagger (x) 1) = m^dagger m.
  double frobenius_left = 0.0;
  /// (m (x) 1)(1 (x) m^dagger) = m^dagger m.
  double frobenius_right = 0.0;
  /// m m^dagger = dim E 1.
  double special = 0.0;
  /// iota^dagger iota = 1.
  double unit_norm = 0.0;
  bool pass = false;

  std::vector<std::pair<std::string, double>> residuals() const;
};

QSystemReport verify_qsystem(const AlgebraObject& q, const FusionData& fd, double tol = 1e-8);

/// sigma_{L,W}: [L] ++ W -> W ++ [L] for a pair algebra. W empty or the unit gives the
/// identity exactly.
Morphism half_braiding(const DiagramEngine& eng, const AlgebraObject& q, const Wire& w);
Morphism half_braiding(const DiagramEngine& eng, const AlgebraObject& q, Label w);

struct HalfBraidingReport {
  double unitarity = 0.0;
  double hexagon = 0.0;
  double multiplication = 0.0;
  double unit = 0.0;
  /// max |sigma_{L,1} - 1| with sigma_{L,1} evaluated through the general formula.
  double unit_label = 0.0;
  bool pass = false;

  std::vector<std::pair<std::string, double>> residuals() const;
};

/// All simple labels for unitarity, multiplication and unit compatibility; all pairs for the hexagon.
HalfBraidingReport verify_half_braiding(const FusionData& fd, const AlgebraObject& q, double tol = 1e-8);

}  // namespace stabnet
