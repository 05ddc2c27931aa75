// stabnet: run one named check or a suite and write a JSON report.
//
// Exit codes: 0 pass, 1 fail, 2 input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stabnet/checks.hpp"
#include "stabnet/errors.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

struct Options {
  std::string graph, fusion, algebra;
  std::vector<std::int64_t> total, inner, sites;
  std::vector<std::string> labels;
  bool modulo_center = false;
  std::optional<std::int64_t> ancilla, radius, n, half_block, D, samples, max_interval, site_count, phi_max;
};

void write_output(const std::string& json, const std::string& path) {
  if (path.empty()) {
    std::cout << json << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw stabnet::InputError("cannot write report to " + path);
  out << json << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-truncation checks for path-model nets and fusion data"};
  app.require_subcommand(1);
  double tol = stabnet::kDefaultTolerance;
  std::uint64_t seed = 0;
  std::string report;
  std::string config;
  Options o;

  const std::map<std::string, std::string> about = {
      {"graph-validate", "load a graph, find its uniform reach, test the net axioms"},
      {"haag", "commutant of A_{Lambda \\ F} against iota(A_F)"},
      {"factorize", "build the Lambda bijections and compare block dimensions"},
      {"alpha-check", "homomorphism and spread of alpha on random interior operators"},
      {"trace-check", "Markov trace compatibility with inclusions"},
      {"tl-check", "Temperley-Lieb relations of the Jones projections"},
      {"expectation", "conditional expectation onto the Temperley-Lieb subalgebra"},
      {"qsystem", "Q-system axioms of a pair or regular algebra"},
      {"halfbraid", "half-braiding axioms of the pair algebra"},
      {"pentagon", "pentagon equation for fusion data"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : stabnet::check_names()) {
    const auto it = about.find(name);
    auto* s = app.add_subcommand(name, it == about.end() ? std::string() : it->second);
    s->add_option("--tol", tol, "tolerance")->capture_default_str();
    s->add_option("--seed", seed, "random seed")->capture_default_str();
    s->add_option("--report", report, "write the JSON report here instead of stdout");
    subs[name] = s;
  }
  auto graph_opt = [&](CLI::App* s) { s->add_option("--graph", o.graph, "graph JSON file")->required(); };
  auto fusion_opt = [&](CLI::App* s) { s->add_option("--fusion", o.fusion, "fusion data JSON file")->required(); };
  auto lambda_opts = [&](CLI::App* s) {
    s->add_option("--n", o.n, "number of blocks");
    s->add_option("--half-block", o.half_block, "k, half the block length");
    s->add_option("--D", o.D, "ancilla dimension per site");
  };

  graph_opt(subs["graph-validate"]);
  subs["graph-validate"]->add_option("--max-interval", o.max_interval, "longest interval tested");

  auto* haag = subs["haag"];
  graph_opt(haag);
  haag->add_option("--total", o.total, "window Lambda as lo hi")->required()->expected(2);
  auto* inner = haag->add_option("--inner", o.inner, "interval I as lo hi")->expected(2);
  auto* sites = haag->add_option("--sites", o.sites, "finite site set F");
  inner->excludes(sites);
  haag->add_option("--ancilla", o.ancilla, "ancilla dimension per site");
  haag->add_option("--radius", o.radius, "allowed radius R");
  haag->add_flag("--modulo-center", o.modulo_center, "compare with iota(A_F) joined with the center of A_Lambda");

  graph_opt(subs["factorize"]);
  lambda_opts(subs["factorize"]);
  subs["factorize"]->add_option("--phi-max", o.phi_max, "also sweep phi/psi for l, t, D up to this bound");

  auto* alpha = subs["alpha-check"];
  graph_opt(alpha);
  lambda_opts(alpha);
  alpha->add_option("--samples", o.samples, "random operator pairs");
  alpha->add_option("--sites", o.sites, "register sites the operators act on");

  graph_opt(subs["trace-check"]);
  subs["trace-check"]->add_option("--samples", o.samples, "random elements");
  subs["trace-check"]->add_option("--max-interval", o.max_interval, "sites 0..max-interval-1 are used");

  graph_opt(subs["tl-check"]);
  subs["tl-check"]->add_option("--sites", o.site_count, "chain length");

  graph_opt(subs["expectation"]);
  subs["expectation"]->add_option("--sites", o.site_count, "chain length");
  subs["expectation"]->add_option("--samples", o.samples, "random samples");

  fusion_opt(subs["qsystem"]);
  subs["qsystem"]->add_option("--labels", o.labels, "module labels (default: all)");
  subs["qsystem"]->add_option("--algebra", o.algebra, "lagrangian or regular");
  fusion_opt(subs["halfbraid"]);
  subs["halfbraid"]->add_option("--labels", o.labels, "module labels (default: all)");
  fusion_opt(subs["pentagon"]);

  auto* suite = app.add_subcommand("suite", "run every check listed in a config file");
  suite->add_option("config", config, "suite config JSON")->required();
  suite->add_option("--report", report, "write the JSON array here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (suite->parsed()) {
      const auto result = stabnet::run_suite(config);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      write_output(stabnet::to_json(result.reports), report);
      for (const auto& r : result.reports)
        std::cerr << (r.pass ? "PASS " : "FAIL ") << r.check << " (" << r.elapsed_ms << " ms)\n";
      return result.pass ? kPass : kFail;
    }

    std::string name;
    for (const auto& [n, s] : subs)
      if (s->parsed()) name = n;

    stabnet::Params p;
    auto put_int = [&](const char* key, const std::optional<std::int64_t>& v) {
      if (v) p.emplace_back(key, *v);
    };
    if (!o.graph.empty()) p.emplace_back("graph", o.graph);
    if (!o.fusion.empty()) p.emplace_back("fusion", o.fusion);
    if (!o.total.empty()) p.emplace_back("total", o.total);
    if (!o.inner.empty()) p.emplace_back("inner", o.inner);
    if (!o.sites.empty()) p.emplace_back("sites", o.sites);
    if (!o.labels.empty()) p.emplace_back("labels", o.labels);
    if (!o.algebra.empty()) p.emplace_back("algebra", o.algebra);
    if (o.modulo_center) p.emplace_back("modulo-center", true);
    put_int("ancilla", o.ancilla);
    put_int("radius", o.radius);
    put_int("n", o.n);
    put_int("half-block", o.half_block);
    put_int("D", o.D);
    put_int("samples", o.samples);
    put_int("max-interval", o.max_interval);
    put_int("sites", o.site_count);
    put_int("phi-max", o.phi_max);
    if (name == "haag" && o.inner.empty() && o.sites.empty())
      throw stabnet::InputError("haag needs --inner or --sites");
    p.emplace_back("tol", tol);

    const auto r = stabnet::run_check(name, p, seed);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    write_output(stabnet::to_json(r), report);
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.check << " max residual " << r.max_residual() << "\n";
    return r.pass ? kPass : kFail;
  } catch (const stabnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
