#pragma once

// Machine-readable results of a single check.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace stabnet {

using ParamValue = std::variant<bool, std::int64_t, double, std::string, std::vector<std::int64_t>,
                                std::vector<std::string>>;
/// Key/value pairs in insertion order.
using Params = std::vector<std::pair<std::string, ParamValue>>;

const ParamValue* find_param(const Params& p, const std::string& key);
void set_param(Params& p, const std::string& key, ParamValue v);

struct CheckReport {
  std::string check;
  Params params;
  std::vector<std::pair<std::string, double>> residuals;
  double tolerance = 1e-8;
  bool pass = false;
  std::int64_t elapsed_ms = 0;
  std::vector<std::string> warnings;

  double max_residual() const;
};

/// {"check", "params", "residuals": [{"name", "value"}], "tolerance", "pass", "elapsed_ms"},
/// plus "warnings" when any were recorded.
std::string to_json(const CheckReport& r, int indent = 2);
std::string to_json(const std::vector<CheckReport>& rs, int indent = 2);

}  // namespace stabnet
