#pragma once

// Named checks shared by the command-line tool and suite configs.
//
// Parameter keys match the CLI flag names without the leading dashes:
// graph, fusion, total, inner, sites, ancilla, radius, n, half-block, D,
// samples, max-interval, phi-max, labels, algebra, modulo-center. Every check
// accepts tol.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stabnet/report.hpp"

namespace stabnet {

inline constexpr double kDefaultTolerance = 1e-8;

std::vector<std::string> check_names();

/// Runs one check. Unknown names, missing parameters and unreadable files raise InputError;
/// structurally impossible parameters raise the corresponding library error.
CheckReport run_check(const std::string& name, const Params& params, std::uint64_t seed);

struct SuiteResult {
  std::vector<CheckReport> reports;
  std::vector<std::string> warnings;
  bool pass = true;
};

/// Config: {"seed": int, "checks": [{"check": name, key: value, ...}]}. The "graph" and
/// "fusion" paths resolve relative to the config file. Malformed configs raise InputError.
SuiteResult run_suite(const std::filesystem::path& config);

}  // namespace stabnet
