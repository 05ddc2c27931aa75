#pragma once

// Skeletal multiplicity-free fusion data.
//
// F convention: ((a b)_e c)_d = sum_f F^{abc}_d[e, f] (a (b c)_f)_d, vertices
// normalized so that splitting vectors are orthonormal.

#include <complex>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace stabnet {

using Label = std::size_t;

class FusionData {
 public:
  /// Reads the file format without checking any identity; load() validates as well.
  static FusionData parse(const std::string& text);
  static FusionData parse_file(const std::filesystem::path& file);
  /// parse_file + validate(); failures raise InputError naming the violated identity.
  static FusionData load(const std::filesystem::path& file);

  std::size_t rank() const { return names_.size(); }
  const std::string& name(Label a) const { return names_.at(a); }
  Label label(const std::string& name) const;
  Label unit() const { return unit_; }
  Label dual(Label a) const { return dual_.at(a); }
  bool admissible(Label a, Label b, Label c) const { return fusion_[(a * rank() + b) * rank() + c]; }
  /// Simple summands of a (x) b in label order.
  std::vector<Label> fuse(Label a, Label b) const;
  double dim(Label a) const { return dims_.at(a); }
  const std::vector<double>& dims() const { return dims_; }

  /// F^{abc}_d[e, f]; zero when the tree is inadmissible. Entries absent from the data
  /// default to 1 only when the block F^{abc}_d is 1 x 1, otherwise InputError.
  std::complex<double> F(Label a, Label b, Label c, Label d, Label e, Label f) const;
  /// Row labels e and column labels f of the block F^{abc}_d.
  std::vector<Label> f_rows(Label a, Label b, Label c, Label d) const;
  std::vector<Label> f_cols(Label a, Label b, Label c, Label d) const;

  /// Unit laws, PF dims, F unitarity, triangle normalization and pentagon; throws InputError.
  void validate(double tol = 1e-10) const;

 private:
  std::vector<std::string> names_;
  Label unit_ = 0;
  std::vector<Label> dual_;
  std::vector<bool> fusion_;
  std::vector<double> dims_;
  std::vector<double> declared_dims_;
  std::map<std::tuple<Label, Label, Label, Label, Label, Label>, std::complex<double>> F_;
};

/// PF eigenvector of the fusion rules normalized at the unit: d_a with d_a d_b = sum_c N_ab^c d_c.
/// Throws DomainError for a reducible fusion ring.
std::vector<double> quantum_dims(const FusionData& fd);

struct PentagonReport {
  double residual = 0.0;
  /// Label tuple (a, b, c, d, e, p, q, r, s) attaining the residual.
  std::string worst;
  std::size_t equations = 0;
  bool pass = false;
};

/// F^{pcd}_e[q,r] F^{abr}_e[p,s] = sum_x F^{abc}_q[p,x] F^{axd}_e[q,s] F^{bcd}_s[x,r].
PentagonReport verify_pentagon(const FusionData& fd, double tol = 1e-10);

/// max over blocks F^{abc}_d of ||F F^dagger - 1||; non-square blocks count as 1.
double f_unitarity_residual(const FusionData& fd);

}  // namespace stabnet
