#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "json.hpp"

#include "stabnet/checks.hpp"
#include "stabnet/errors.hpp"
#include "support.hpp"

using namespace stabnet;
using nlohmann::json;

TEST(ReportJson, Schema) {
  CheckReport r;
  r.check = "demo";
  r.params = {{"n", std::int64_t{2}}, {"graph", std::string("g.json")}, {"sites", std::vector<std::int64_t>{1, 2}}};
  r.residuals = {{"a", 1e-14}, {"b", std::numeric_limits<double>::quiet_NaN()}};
  r.pass = true;
  const auto doc = json::parse(to_json(r));
  EXPECT_EQ(doc["check"], "demo");
  EXPECT_EQ(doc["params"]["n"], 2);
  EXPECT_EQ(doc["params"]["sites"], json::array({1, 2}));
  ASSERT_EQ(doc["residuals"].size(), 2u);
  EXPECT_EQ(doc["residuals"][0]["name"], "a");
  EXPECT_TRUE(doc["residuals"][1]["value"].is_null());
  EXPECT_TRUE(doc["pass"].get<bool>());
  EXPECT_TRUE(doc.contains("tolerance"));
  EXPECT_TRUE(doc.contains("elapsed_ms"));
  EXPECT_FALSE(doc.contains("warnings"));

  r.warnings.push_back("w");
  EXPECT_EQ(json::parse(to_json(r))["warnings"], json::array({"w"}));
  EXPECT_TRUE(json::parse(to_json(std::vector<CheckReport>{r, r})).is_array());
}

TEST(ReportJson, MaxResidual) {
  CheckReport r;
  r.residuals = {{"a", 0.5}, {"b", 2.0}};
  EXPECT_EQ(r.max_residual(), 2.0);
}

TEST(RunCheck, PentagonAndErrors) {
  const Params ok = {{"fusion", test::data_path("fusion/fibonacci.json")}};
  const auto rep = run_check("pentagon", ok, 1);
  EXPECT_EQ(rep.check, "pentagon");
  EXPECT_TRUE(rep.pass);
  EXPECT_THROW(run_check("no-such-check", ok, 1), InputError);
  EXPECT_THROW(run_check("pentagon", {}, 1), InputError);
  EXPECT_THROW(run_check("haag", {{"graph", std::string("/nonexistent.json")}, {"total", std::vector<std::int64_t>{0, 2}},
                                  {"inner", std::vector<std::int64_t>{1, 1}}},
                         1),
               InputError);
}

TEST(RunCheck, SeedDeterminesResult) {
  const Params p = {{"graph", test::data_path("graphs/fibonacci.json")}, {"samples", std::int64_t{5}}};
  const auto a = run_check("trace-check", p, 9);
  const auto b = run_check("trace-check", p, 9);
  ASSERT_EQ(a.residuals.size(), b.residuals.size());
  for (std::size_t i = 0; i < a.residuals.size(); ++i) EXPECT_EQ(a.residuals[i].second, b.residuals[i].second);
}

TEST(RunCheck, NamesAreListed) {
  const auto names = check_names();
  for (const auto* n : {"graph-validate", "haag", "factorize", "alpha-check", "trace-check", "tl-check", "expectation",
                        "qsystem", "halfbraid", "pentagon"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}

TEST(Suite, QuickSuitePasses) {
  const auto res = run_suite(test::data_path("suites/quick.json"));
  EXPECT_TRUE(res.pass);
  EXPECT_EQ(res.reports.size(), 11u);
  for (const auto& r : res.reports) EXPECT_TRUE(r.pass) << r.check;
}

TEST(Suite, MalformedConfig) {
  EXPECT_THROW(run_suite(test::data_path("suites/missing.json")), InputError);
}
