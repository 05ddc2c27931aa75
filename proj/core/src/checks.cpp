#include "stabnet/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "json.hpp"
#include "stabnet/errors.hpp"
#include "stabnet/factorization.hpp"
#include "stabnet/fusion.hpp"
#include "stabnet/haag.hpp"
#include "stabnet/qsystem.hpp"
#include "stabnet/subalgebra.hpp"

namespace stabnet {

namespace {

using json = nlohmann::json;

std::string type_error(const std::string& key, const char* want) {
  return "parameter \"" + key + "\" must be " + want;
}

const ParamValue& required(const Params& p, const std::string& key) {
  const ParamValue* v = find_param(p, key);
  if (!v) throw InputError("missing parameter \"" + key + "\"");
  return *v;
}

std::int64_t get_int(const Params& p, const std::string& key, std::optional<std::int64_t> fallback = {}) {
  const ParamValue* v = find_param(p, key);
  if (!v) {
    if (fallback) return *fallback;
    throw InputError("missing parameter \"" + key + "\"");
  }
  if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
  throw InputError(type_error(key, "an integer"));
}

bool get_bool(const Params& p, const std::string& key, bool fallback) {
  const ParamValue* v = find_param(p, key);
  if (!v) return fallback;
  if (const auto* b = std::get_if<bool>(v)) return *b;
  throw InputError(type_error(key, "a boolean"));
}

std::size_t get_count(const Params& p, const std::string& key, std::int64_t fallback) {
  const auto v = get_int(p, key, fallback);
  if (v < 0) throw InputError(type_error(key, "nonnegative"));
  return static_cast<std::size_t>(v);
}

double get_double(const Params& p, const std::string& key, double fallback) {
  const ParamValue* v = find_param(p, key);
  if (!v) return fallback;
  if (const auto* d = std::get_if<double>(v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
  throw InputError(type_error(key, "a number"));
}

std::string get_string(const Params& p, const std::string& key, std::optional<std::string> fallback = {}) {
  const ParamValue* v = find_param(p, key);
  if (!v) {
    if (fallback) return *fallback;
    throw InputError("missing parameter \"" + key + "\"");
  }
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  throw InputError(type_error(key, "a string"));
}

std::vector<std::int64_t> get_ints(const Params& p, const std::string& key) {
  const ParamValue& v = required(p, key);
  if (const auto* xs = std::get_if<std::vector<std::int64_t>>(&v)) return *xs;
  if (const auto* x = std::get_if<std::int64_t>(&v)) return {*x};
  throw InputError(type_error(key, "a list of integers"));
}

std::vector<std::string> get_strings(const Params& p, const std::string& key) {
  const ParamValue& v = required(p, key);
  if (const auto* xs = std::get_if<std::vector<std::string>>(&v)) return *xs;
  if (const auto* xs = std::get_if<std::vector<std::int64_t>>(&v)) {
    std::vector<std::string> out;
    for (auto x : *xs) out.push_back(std::to_string(x));
    return out;
  }
  if (const auto* s = std::get_if<std::string>(&v)) return {*s};
  if (const auto* i = std::get_if<std::int64_t>(&v)) return {std::to_string(*i)};
  throw InputError(type_error(key, "a list of labels"));
}

Interval get_interval(const Params& p, const std::string& key) {
  const auto xs = get_ints(p, key);
  if (xs.size() != 2) throw InputError(type_error(key, "two integers lo hi"));
  if (xs[0] > xs[1]) throw InputError("parameter \"" + key + "\" has lo > hi");
  return {static_cast<long>(xs[0]), static_cast<long>(xs[1])};
}

std::shared_ptr<const Graph> load_graph(const Params& p) {
  return std::make_shared<const Graph>(Graph::load(get_string(p, "graph")));
}

void finish(CheckReport& r) {
  r.pass = r.pass && r.max_residual() <= r.tolerance;
}

std::vector<std::int64_t> as_ints(const std::vector<long>& xs) { return {xs.begin(), xs.end()}; }

// ---------------------------------------------------------------------------

void graph_validate(const Params& p, std::mt19937_64& rng, CheckReport& r) {
  const auto g = load_graph(p);
  const auto max_interval = get_count(p, "max-interval", 3);
  set_param(r.params, "vertices", static_cast<std::int64_t>(g->vertex_count()));
  set_param(r.params, "symmetric", g->is_symmetric());
  r.pass = true;
  try {
    set_param(r.params, "uniform_reach", static_cast<std::int64_t>(uniform_reach(*g)));
    r.residuals.emplace_back("uniformly_connected", 0.0);
  } catch (const NotUniformlyConnected& e) {
    r.residuals.emplace_back("uniformly_connected", 1.0);
    r.warnings.emplace_back(e.what());
    r.pass = false;
  }
  try {
    const auto td = compute_trace_data(*g);
    set_param(r.params, "pf_eigenvalue", td.eigenvalue);
    r.residuals.emplace_back("pf_left", td.left_residual);
    r.residuals.emplace_back("pf_right", td.right_residual);
    if (td.asymmetric) r.warnings.emplace_back("left and right PF vectors differ; Markov trace uses u_i v_j");
  } catch (const DomainError& e) {
    r.warnings.emplace_back(e.what());
    r.pass = false;
  }
  const auto net = validate_net(g, max_interval, rng, r.tolerance);
  for (const auto& a : net.axioms) r.residuals.emplace_back(a.name, a.residual);
  r.pass = r.pass && net.pass;
}

void haag(const Params& p, std::mt19937_64&, CheckReport& r) {
  const auto g = load_graph(p);
  const Interval total = get_interval(p, "total");
  SiteSet F;
  if (find_param(p, "sites")) {
    std::vector<long> sites;
    for (auto s : get_ints(p, "sites")) sites.push_back(static_cast<long>(s));
    F = SiteSet(sites);
  } else {
    F = SiteSet::of(get_interval(p, "inner"));
  }
  std::optional<std::size_t> ancilla;
  if (find_param(p, "ancilla")) ancilla = get_count(p, "ancilla", 1);
  const long radius = static_cast<long>(get_int(p, "radius", 0));
  const bool modulo_center = get_bool(p, "modulo-center", false);
  const auto rep = haag_check(g, total, F, ancilla, r.tolerance, radius, modulo_center);
  set_param(r.params, "F", F.to_string());
  set_param(r.params, "commutant_dim", static_cast<std::int64_t>(rep.commutant_dim));
  set_param(r.params, "subalgebra_dim", static_cast<std::int64_t>(rep.subalgebra_dim));
  if (rep.minimal_radius) set_param(r.params, "minimal_radius", static_cast<std::int64_t>(*rep.minimal_radius));
  set_param(r.params, "structural_condition",
            std::string("minimal_radius <= radius; commutant_dim == subalgebra_dim when radius is 0"));
  r.residuals.emplace_back("containment", rep.containment_residual);
  r.warnings = rep.warnings;
  r.pass = rep.pass;
}

void factorize(const Params& p, std::mt19937_64&, CheckReport& r) {
  const auto g = load_graph(p);
  const auto n = get_count(p, "n", 2);
  const auto k = get_count(p, "half-block", 1);
  const auto D = get_count(p, "D", 2);
  const auto phi_max = get_count(p, "phi-max", 0);
  r.tolerance = 0.0;
  const LambdaFamily fam(g, n, k, D);
  const auto dom = fam.domain_algebra();
  double bijection_defects = 0.0, dimension_defects = 0.0;
  std::vector<std::string> dims;
  for (Vertex i = 0; i < g->vertex_count(); ++i)
    for (Vertex j = 0; j < g->vertex_count(); ++j) {
      const auto& b = fam.block(i, j);
      if (!b.bijection.is_bijection()) bijection_defects += 1.0;
      const auto d = dom.block_dim(i, j);
      if (d != b.size()) dimension_defects += 1.0;
      dims.push_back(std::to_string(i) + "," + std::to_string(j) + ": " + std::to_string(d) + " -> " +
                     std::to_string(b.size()));
    }
  set_param(r.params, "block_dims", dims);
  r.residuals.emplace_back("bijection_defects", bijection_defects);
  r.residuals.emplace_back("dimension_defects", dimension_defects);
  if (phi_max > 0) {
    double defects = 0.0;
    for (std::size_t l = 1; l <= phi_max; ++l)
      for (std::size_t d = 1; d <= phi_max; ++d) {
        const auto regs = RegisterShape::uniform(0, 1, d);
        if (!phi(l, regs).is_bijection()) defects += 1.0;
        if (!psi(l, regs).is_bijection()) defects += 1.0;
      }
    r.residuals.emplace_back("phi_psi_defects", defects);
  }
  r.pass = true;
}

void alpha_check(const Params& p, std::mt19937_64& rng, CheckReport& r) {
  const auto g = load_graph(p);
  const auto n = get_count(p, "n", 2);
  const auto k = get_count(p, "half-block", 1);
  const auto D = get_count(p, "D", 2);
  const auto samples = get_count(p, "samples", 100);
  const LambdaFamily fam(g, n, k, D);
  std::vector<long> sites;
  if (find_param(p, "sites")) {
    for (auto s : get_ints(p, "sites")) sites.push_back(static_cast<long>(s));
  } else {
    for (long s = fam.middle().lo; s <= fam.middle().hi; ++s) sites.push_back(s);
  }
  set_param(r.params, "sites", as_ints(sites));
  const auto sectors = admissible_sectors({&fam}, sites);
  set_param(r.params, "atoms", static_cast<std::int64_t>(sectors.atoms.size()));
  const Interval support(*std::min_element(sites.begin(), sites.end()), *std::max_element(sites.begin(), sites.end()));

  double hom = 0.0, adj = 0.0, spread = 0.0;
  long radius = 0;
  bool spread_ok = true;
  std::optional<SpreadContext> ctx;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto a = random_admissible_operator(sectors, rng);
    const auto b = random_admissible_operator(sectors, rng);
    const auto A = alpha_sparse(a, fam);
    const auto B = alpha_sparse(b, fam);
    hom = std::max(hom, (alpha_sparse(a * b, fam) - A * B).max_abs());
    adj = std::max(adj, (alpha_sparse(a.adjoint(), fam) - A.adjoint()).max_abs());
    if (!ctx) ctx.emplace(A.algebra);
    const auto rep = spread_certificate(*ctx, A, support, static_cast<long>(k), r.tolerance);
    spread = std::max(spread, rep.residual);
    radius = std::max(radius, rep.radius);
    spread_ok = spread_ok && rep.pass;
    if (!rep.pass && !rep.witness.empty()) r.warnings.push_back("spread witness: " + rep.witness);
  }
  set_param(r.params, "spread_radius", static_cast<std::int64_t>(radius));
  set_param(r.params, "spread_bound", static_cast<std::int64_t>(k));
  set_param(r.params, "structural_condition", std::string("spread_radius <= spread_bound"));
  r.residuals.emplace_back("homomorphism", hom);
  r.residuals.emplace_back("adjoint", adj);
  r.residuals.emplace_back("spread_commutator", spread);
  r.pass = spread_ok && radius <= static_cast<long>(k);
}

void trace_check(const Params& p, std::mt19937_64& rng, CheckReport& r) {
  const auto g = load_graph(p);
  const auto samples = get_count(p, "samples", 100);
  const auto max_interval = static_cast<long>(get_count(p, "max-interval", 4));
  if (max_interval < 1) throw InputError("max-interval must be at least 1");
  const auto td = compute_trace_data(*g);
  if (td.asymmetric) r.warnings.emplace_back("left and right PF vectors differ; Markov trace uses u_i v_j");
  std::uniform_int_distribution<long> pick(0, max_interval - 1);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    long a = pick(rng), b = pick(rng), c = pick(rng), d = pick(rng);
    long lo = std::min(a, b), hi = std::max(a, b);
    const Interval J(std::min({a, b, c, d}), std::max({a, b, c, d}));
    const Interval I(std::max(lo, J.lo), std::min(hi, J.hi));
    const auto f = random_operator(LocalAlgebra(g, I), rng);
    worst = std::max(worst, std::abs(markov_trace(include(f, J), td) - markov_trace(f, td)));
  }
  r.residuals.emplace_back("trace_compatibility", worst);
  r.pass = true;
}

Interval chain_interval(const Params& p, std::int64_t fallback) {
  const auto sites = get_count(p, "sites", fallback);
  if (sites < 2) throw InputError("sites must be at least 2");
  return {0, static_cast<long>(sites) - 1};
}

void tl_check(const Params& p, std::mt19937_64&, CheckReport& r) {
  const auto g = load_graph(p);
  const Interval I = chain_interval(p, 4);
  const auto td = compute_trace_data(*g);
  const auto e = tl_generators(g, td, I);
  const auto res = check_tl_relations(e, td.eigenvalue);
  set_param(r.params, "generators", static_cast<std::int64_t>(e.size()));
  set_param(r.params, "lambda", td.eigenvalue);
  r.residuals = {{"idempotent", res.idempotent},
                 {"selfadjoint", res.selfadjoint},
                 {"braid", res.braid},
                 {"commuting", res.commuting}};
  r.pass = true;
}

void expectation(const Params& p, std::mt19937_64& rng, CheckReport& r) {
  const auto g = load_graph(p);
  const Interval I = chain_interval(p, 3);
  const auto samples = get_count(p, "samples", 20);
  const auto td = compute_trace_data(*g);
  const SubalgebraSpec spec{LocalAlgebra(g, I), tl_generators(g, td, I)};
  const auto E = conditional_expectation(spec, td);
  const auto res = check_expectation(E, td, rng, samples);
  set_param(r.params, "subalgebra_dim", static_cast<std::int64_t>(E.subalgebra_basis.size()));
  set_param(r.params, "ambient_dim", static_cast<std::int64_t>(spec.ambient.dimension()));
  r.residuals = {{"idempotent", res.idempotent},
                 {"unital", res.unital},
                 {"bimodule", res.bimodule},
                 {"trace", res.trace},
                 {"positivity", res.positivity}};
  try {
    const auto pp = pp_basis(spec, E, td, std::numeric_limits<double>::infinity());
    set_param(r.params, "pp_basis_size", static_cast<std::int64_t>(pp.elements.size()));
    r.residuals.emplace_back("pp_reconstruction", pp.residual);
  } catch (const ToleranceError& e) {
    r.warnings.emplace_back(e.what());
    r.residuals.emplace_back("pp_reconstruction", std::numeric_limits<double>::infinity());
  }
  r.pass = true;
}

std::vector<Label> module_labels(const Params& p, const FusionData& fd) {
  std::vector<Label> out;
  if (!find_param(p, "labels")) {
    for (Label a = 0; a < fd.rank(); ++a) out.push_back(a);
    return out;
  }
  for (const auto& name : get_strings(p, "labels")) out.push_back(fd.label(name));
  return out;
}

std::vector<std::string> label_names(const FusionData& fd, const std::vector<Label>& ls) {
  std::vector<std::string> out;
  for (Label a : ls) out.push_back(fd.name(a));
  return out;
}

void qsystem(const Params& p, std::mt19937_64&, CheckReport& r) {
  const auto fd = FusionData::load(get_string(p, "fusion"));
  const auto kind = get_string(p, "algebra", std::string("lagrangian"));
  AlgebraObject q;
  if (kind == "lagrangian") {
    q = build_lagrangian_qsystem(fd, module_labels(p, fd));
    set_param(r.params, "module_labels", label_names(fd, q.module_labels));
  } else if (kind == "regular") {
    q = regular_algebra(fd);
  } else {
    throw InputError("algebra must be \"lagrangian\" or \"regular\"");
  }
  set_param(r.params, "summands", label_names(fd, q.summands));
  set_param(r.params, "dim_E", q.dim_e);
  const auto rep = verify_qsystem(q, fd, r.tolerance);
  r.residuals = rep.residuals();
  r.pass = true;
}

void halfbraid(const Params& p, std::mt19937_64&, CheckReport& r) {
  const auto fd = FusionData::load(get_string(p, "fusion"));
  const auto q = build_lagrangian_qsystem(fd, module_labels(p, fd));
  set_param(r.params, "module_labels", label_names(fd, q.module_labels));
  set_param(r.params, "summands", label_names(fd, q.summands));
  const DiagramEngine eng(fd);
  const auto id = half_braiding(eng, q, fd.unit());
  double exact = 0.0;
  for (const auto& b : id.blocks)
    if (b.size() > 0 && !b.isIdentity(0.0)) exact = 1.0;
  set_param(r.params, "unit_label_identity_exact", exact == 0.0);
  const auto rep = verify_half_braiding(fd, q, r.tolerance);
  r.residuals = rep.residuals();
  r.pass = exact == 0.0;
}

void pentagon(const Params& p, std::mt19937_64&, CheckReport& r) {
  const auto fd = FusionData::parse_file(get_string(p, "fusion"));
  const auto rep = verify_pentagon(fd, r.tolerance);
  set_param(r.params, "labels", label_names(fd, [&] {
              std::vector<Label> all;
              for (Label a = 0; a < fd.rank(); ++a) all.push_back(a);
              return all;
            }()));
  set_param(r.params, "equations", static_cast<std::int64_t>(rep.equations));
  if (!rep.pass) set_param(r.params, "worst", rep.worst);
  r.residuals = {{"pentagon", rep.residual}, {"f_unitarity", f_unitarity_residual(fd)}};
  r.pass = true;
}

using CheckFn = std::function<void(const Params&, std::mt19937_64&, CheckReport&)>;

const std::map<std::string, CheckFn>& registry() {
  static const std::map<std::string, CheckFn> checks = {
      {"graph-validate", graph_validate}, {"haag", haag},         {"factorize", factorize},
      {"alpha-check", alpha_check},       {"trace-check", trace_check}, {"tl-check", tl_check},
      {"expectation", expectation},       {"qsystem", qsystem},   {"halfbraid", halfbraid},
      {"pentagon", pentagon}};
  return checks;
}

ParamValue from_json(const std::string& key, const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    if (std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); }))
      return v.get<std::vector<std::int64_t>>();
    if (std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_string(); }))
      return v.get<std::vector<std::string>>();
  }
  throw InputError("config value for \"" + key + "\" has an unsupported type");
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

CheckReport run_check(const std::string& name, const Params& params, std::uint64_t seed) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw InputError("unknown check \"" + name + "\"");
  CheckReport r;
  r.check = name;
  r.params = params;
  r.tolerance = get_double(params, "tol", kDefaultTolerance);
  if (!(r.tolerance >= 0.0)) throw InputError("tol must be nonnegative");
  set_param(r.params, "seed", static_cast<std::int64_t>(seed));
  std::mt19937_64 rng(seed);
  const auto start = std::chrono::steady_clock::now();
  it->second(params, rng, r);
  finish(r);
  r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SuiteResult run_suite(const std::filesystem::path& config) {
  std::ifstream in(config);
  if (!in) throw InputError("cannot read suite config " + config.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("suite config parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("checks") || !doc["checks"].is_array())
    throw InputError("suite config needs a \"checks\" list");
  std::uint64_t seed = 0;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw InputError("\"seed\" must be a nonnegative integer");
    seed = doc["seed"].get<std::uint64_t>();
  }
  const auto base = config.parent_path();

  // Parse every entry first so a malformed config fails before any check runs.
  std::vector<std::pair<std::string, Params>> jobs;
  for (const auto& entry : doc["checks"]) {
    if (!entry.is_object() || !entry.contains("check") || !entry["check"].is_string())
      throw InputError("each suite entry needs a \"check\" name");
    const auto name = entry["check"].get<std::string>();
    if (!registry().count(name)) throw InputError("unknown check \"" + name + "\"");
    Params params;
    for (auto it = entry.begin(); it != entry.end(); ++it) {
      if (it.key() == "check") continue;
      ParamValue v = from_json(it.key(), it.value());
      if ((it.key() == "graph" || it.key() == "fusion") && std::holds_alternative<std::string>(v)) {
        const std::filesystem::path path(std::get<std::string>(v));
        if (path.is_relative()) v = (base / path).lexically_normal().string();
      }
      params.emplace_back(it.key(), std::move(v));
    }
    jobs.emplace_back(name, std::move(params));
  }

  SuiteResult out;
  if (jobs.empty()) out.warnings.emplace_back("suite lists no checks");
  for (const auto& [name, params] : jobs) {
    out.reports.push_back(run_check(name, params, seed));
    out.pass = out.pass && out.reports.back().pass;
  }
  return out;
}

}  // namespace stabnet
