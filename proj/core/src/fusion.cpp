#include "stabnet/fusion.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"
#include "stabnet/errors.hpp"

namespace stabnet {

namespace {

using json = nlohmann::json;
using cplx = std::complex<double>;

std::string label_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError("labels must be strings or integers");
}

std::string tree_text(const FusionData& fd, std::initializer_list<Label> ls) {
  std::string s = "(";
  bool first = true;
  for (Label l : ls) {
    if (!first) s += ",";
    s += fd.name(l);
    first = false;
  }
  return s + ")";
}

}  // namespace

Label FusionData::label(const std::string& name) const {
  for (Label a = 0; a < names_.size(); ++a)
    if (names_[a] == name) return a;
  throw InputError("unknown label \"" + name + "\"");
}

std::vector<Label> FusionData::fuse(Label a, Label b) const {
  std::vector<Label> out;
  for (Label c = 0; c < rank(); ++c)
    if (admissible(a, b, c)) out.push_back(c);
  return out;
}

std::vector<Label> FusionData::f_rows(Label a, Label b, Label c, Label d) const {
  std::vector<Label> out;
  for (Label e = 0; e < rank(); ++e)
    if (admissible(a, b, e) && admissible(e, c, d)) out.push_back(e);
  return out;
}

std::vector<Label> FusionData::f_cols(Label a, Label b, Label c, Label d) const {
  std::vector<Label> out;
  for (Label f = 0; f < rank(); ++f)
    if (admissible(b, c, f) && admissible(a, f, d)) out.push_back(f);
  return out;
}

std::complex<double> FusionData::F(Label a, Label b, Label c, Label d, Label e, Label f) const {
  if (!(admissible(a, b, e) && admissible(e, c, d) && admissible(b, c, f) && admissible(a, f, d))) return 0.0;
  auto it = F_.find({a, b, c, d, e, f});
  if (it != F_.end()) return it->second;
  if (f_rows(a, b, c, d).size() == 1 && f_cols(a, b, c, d).size() == 1) return 1.0;
  throw InputError("missing F entry F^" + tree_text(*this, {a, b, c}) + "_" + name(d) + "[" + name(e) + "," +
                   name(f) + "]");
}

FusionData FusionData::parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("fusion file parse error: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("fusion file must be a JSON object");
  for (const char* key : {"labels", "unit", "dual", "fusion", "F"})
    if (!doc.contains(key)) throw InputError(std::string("fusion file lacks \"") + key + "\"");

  FusionData fd;
  if (!doc["labels"].is_array() || doc["labels"].empty()) throw InputError("\"labels\" must be a nonempty array");
  for (const auto& l : doc["labels"]) fd.names_.push_back(label_text(l));
  const std::size_t n = fd.rank();
  fd.unit_ = fd.label(label_text(doc["unit"]));

  const auto& dual = doc["dual"];
  if (!dual.is_object()) throw InputError("\"dual\" must map labels to labels");
  fd.dual_.assign(n, n);
  for (auto it = dual.begin(); it != dual.end(); ++it) fd.dual_[fd.label(it.key())] = fd.label(label_text(it.value()));
  for (Label a = 0; a < n; ++a)
    if (fd.dual_[a] == n) throw InputError("dual missing for label " + fd.names_[a]);

  fd.fusion_.assign(n * n * n, false);
  if (!doc["fusion"].is_array()) throw InputError("\"fusion\" must be a list of triples");
  for (const auto& t : doc["fusion"]) {
    if (!t.is_array() || t.size() != 3) throw InputError("fusion entries must be triples [a, b, c]");
    const Label a = fd.label(label_text(t[0])), b = fd.label(label_text(t[1])), c = fd.label(label_text(t[2]));
    fd.fusion_[(a * n + b) * n + c] = true;
  }

  if (!doc["F"].is_array()) throw InputError("\"F\" must be a list of entries");
  for (const auto& e : doc["F"]) {
    if (!e.is_object() || !e.contains("abcd") || !e.contains("e") || !e.contains("f") || !e.contains("re"))
      throw InputError("F entries need \"abcd\", \"e\", \"f\" and \"re\"");
    const auto& abcd = e["abcd"];
    if (!abcd.is_array() || abcd.size() != 4) throw InputError("\"abcd\" must list four labels");
    Label L[4];
    for (int k = 0; k < 4; ++k) L[k] = fd.label(label_text(abcd[static_cast<std::size_t>(k)]));
    const Label le = fd.label(label_text(e["e"])), lf = fd.label(label_text(e["f"]));
    if (!(fd.admissible(L[0], L[1], le) && fd.admissible(le, L[2], L[3]) && fd.admissible(L[1], L[2], lf) &&
          fd.admissible(L[0], lf, L[3])))
      throw InputError("F entry for an inadmissible tree " + tree_text(fd, {L[0], L[1], L[2], L[3], le, lf}));
    if (!e["re"].is_number() || (e.contains("im") && !e["im"].is_number()))
      throw InputError("F values must be numbers");
    const double im = e.contains("im") ? e["im"].get<double>() : 0.0;
    fd.F_[{L[0], L[1], L[2], L[3], le, lf}] = cplx(e["re"].get<double>(), im);
  }

  if (doc.contains("dims")) {
    const auto& d = doc["dims"];
    fd.declared_dims_.assign(n, 0.0);
    if (d.is_object()) {
      for (auto it = d.begin(); it != d.end(); ++it) fd.declared_dims_[fd.label(it.key())] = it.value().get<double>();
    } else if (d.is_array() && d.size() == n) {
      for (std::size_t a = 0; a < n; ++a) fd.declared_dims_[a] = d[a].get<double>();
    } else {
      throw InputError("\"dims\" must map labels to numbers");
    }
  }
  try {
    fd.dims_ = quantum_dims(fd);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  return fd;
}

FusionData FusionData::parse_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot read fusion file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

FusionData FusionData::load(const std::filesystem::path& file) {
  FusionData fd = parse_file(file);
  fd.validate();
  return fd;
}

void FusionData::validate(double tol) const {
  const std::size_t n = rank();
  if (dual(unit_) != unit_) throw InputError("unit law violated: dual(1) != 1");
  for (Label a = 0; a < n; ++a) {
    if (fuse(unit_, a) != std::vector<Label>{a} || fuse(a, unit_) != std::vector<Label>{a})
      throw InputError("unit law violated for label " + name(a));
    if (dual(dual(a)) != a) throw InputError("dual is not an involution at label " + name(a));
    if (!admissible(a, dual(a), unit_)) throw InputError("a (x) dual(a) does not contain 1 for label " + name(a));
  }
  if (!declared_dims_.empty())
    for (Label a = 0; a < n; ++a)
      if (std::abs(declared_dims_[a] - dims_[a]) > 1e-8)
        throw InputError("declared dimension of " + name(a) + " differs from the PF eigenvalue");
  for (Label a = 0; a < n; ++a)
    for (Label b = 0; b < n; ++b) {
      double rhs = 0.0;
      for (Label c : fuse(a, b)) rhs += dims_[c];
      if (std::abs(dims_[a] * dims_[b] - rhs) > 1e-8)
        throw InputError("dimension identity d_a d_b = sum_c N_ab^c d_c fails for " + tree_text(*this, {a, b}));
    }
  const double unitarity = f_unitarity_residual(*this);
  if (unitarity > tol) throw InputError("non-unitary F: residual " + std::to_string(unitarity));
  for (Label a = 0; a < n; ++a)
    for (Label b = 0; b < n; ++b)
      for (Label d = 0; d < n; ++d) {
        const Label u = unit_;
        const cplx t1 = F(u, a, b, d, a, d), t2 = F(a, u, b, d, a, b), t3 = F(a, b, u, d, d, b);
        if ((admissible(a, b, d) && (std::abs(t1 - 1.0) > tol || std::abs(t2 - 1.0) > tol || std::abs(t3 - 1.0) > tol)))
          throw InputError("triangle normalization fails at " + tree_text(*this, {a, b, d}));
      }
  const auto pent = verify_pentagon(*this, tol);
  if (!pent.pass)
    throw InputError("pentagon failure: residual " + std::to_string(pent.residual) + " at " + pent.worst);
}

std::vector<double> quantum_dims(const FusionData& fd) {
  const auto n = static_cast<Eigen::Index>(fd.rank());
  Eigen::MatrixXd total = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> N(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (Label a = 0; a < fd.rank(); ++a)
    for (Label b = 0; b < fd.rank(); ++b)
      for (Label c : fd.fuse(a, b)) {
        N[a](static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) = 1.0;
        total(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) += 1.0;
      }
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd w = total * v;
    w.normalize();
    const double change = (w - v.normalized()).norm();
    v = w;
    if (change < 1e-15) break;
  }
  const auto u = static_cast<Eigen::Index>(fd.unit());
  if (v.minCoeff() <= 1e-12) throw DomainError("reducible fusion ring: PF vector is not strictly positive");
  v /= v(u);
  for (Label a = 0; a < fd.rank(); ++a) {
    const double da = v(static_cast<Eigen::Index>(a));
    if ((N[a] * v - da * v).norm() > 1e-8) throw DomainError("fusion matrices share no PF eigenvector");
  }
  return {v.data(), v.data() + n};
}

PentagonReport verify_pentagon(const FusionData& fd, double tol) {
  PentagonReport rep;
  const std::size_t n = fd.rank();
  for (Label a = 0; a < n; ++a)
    for (Label b = 0; b < n; ++b)
      for (Label c = 0; c < n; ++c)
        for (Label d = 0; d < n; ++d)
          for (Label p : fd.fuse(a, b))
            for (Label q : fd.fuse(p, c))
              for (Label e : fd.fuse(q, d))
                for (Label r : fd.fuse(c, d))
                  for (Label s : fd.fuse(b, r)) {
                    if (!fd.admissible(a, s, e)) continue;
                    const cplx lhs = fd.F(p, c, d, e, q, r) * fd.F(a, b, r, e, p, s);
                    cplx rhs = 0.0;
                    for (Label x : fd.fuse(b, c)) rhs += fd.F(a, b, c, q, p, x) * fd.F(a, x, d, e, q, s) * fd.F(b, c, d, s, x, r);
                    const double res = std::abs(lhs - rhs);
                    ++rep.equations;
                    if (rep.worst.empty() || res > rep.residual) {
                      rep.residual = res;
                      rep.worst = tree_text(fd, {a, b, c, d, e, p, q, r, s});
                    }
                  }
  rep.pass = rep.residual <= tol;
  return rep;
}

double f_unitarity_residual(const FusionData& fd) {
  double worst = 0.0;
  const std::size_t n = fd.rank();
  for (Label a = 0; a < n; ++a)
    for (Label b = 0; b < n; ++b)
      for (Label c = 0; c < n; ++c)
        for (Label d = 0; d < n; ++d) {
          const auto rows = fd.f_rows(a, b, c, d);
          const auto cols = fd.f_cols(a, b, c, d);
          if (rows.empty() && cols.empty()) continue;
          if (rows.size() != cols.size()) return 1.0;
          Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
          for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
              m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fd.F(a, b, c, d, rows[i], cols[j]);
          const auto id = Eigen::MatrixXcd::Identity(m.rows(), m.rows());
          worst = std::max(worst, (m * m.adjoint() - id).cwiseAbs().maxCoeff());
        }
  return worst;
}

}  // namespace stabnet
