#include "stabnet/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace stabnet {

namespace {

using json = nlohmann::json;

json to_value(const ParamValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

json to_object(const CheckReport& r) {
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = to_value(v);
  json residuals = json::array();
  for (const auto& [name, value] : r.residuals) {
    // JSON has no infinity; a non-finite residual is written as null.
    residuals.push_back({{"name", name}, {"value", std::isfinite(value) ? json(value) : json(nullptr)}});
  }
  json out = {{"check", r.check},
              {"params", params},
              {"residuals", residuals},
              {"tolerance", r.tolerance},
              {"pass", r.pass},
              {"elapsed_ms", r.elapsed_ms}};
  if (!r.warnings.empty()) out["warnings"] = r.warnings;
  return out;
}

}  // namespace

const ParamValue* find_param(const Params& p, const std::string& key) {
  for (const auto& [k, v] : p)
    if (k == key) return &v;
  return nullptr;
}

void set_param(Params& p, const std::string& key, ParamValue v) {
  for (auto& [k, old] : p)
    if (k == key) {
      old = std::move(v);
      return;
    }
  p.emplace_back(key, std::move(v));
}

double CheckReport::max_residual() const {
  double m = 0.0;
  for (const auto& [name, v] : residuals) m = std::isnan(v) ? std::numeric_limits<double>::infinity() : std::max(m, v);
  return m;
}

std::string to_json(const CheckReport& r, int indent) { return to_object(r).dump(indent); }

std::string to_json(const std::vector<CheckReport>& rs, int indent) {
  json arr = json::array();
  for (const auto& r : rs) arr.push_back(to_object(r));
  return arr.dump(indent);
}

}  // namespace stabnet
