#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace heatlands {

struct CriterionResult {
  std::string id;
  std::string title;
  std::vector<std::string> modules;
  std::string status;  // "pass", "fail" or "skipped"
  std::string message;
  nlohmann::json details;
  double seconds = 0;  // kept out of the canonical report
};

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  std::string only;                      // module filter, empty for all
  std::map<std::string, double> tol;     // overrides of default_tolerances()
  bool determinism = true;               // run the in-process rerun check
};

struct AcceptanceReport {
  std::uint64_t seed = 0;
  std::string only;
  std::map<std::string, double> tol;
  std::vector<CriterionResult> criteria;

  int failures() const;
  // Canonical report: no timestamps, no timings.
  nlohmann::json to_json() const;
  nlohmann::json timings() const;
  std::string summary() const;  // one line per criterion
};

const std::map<std::string, double>& default_tolerances();
const std::vector<std::string>& module_names();

// Throws InvalidArgument on unknown tolerance names, non-positive values or
// unknown modules.
AcceptanceReport run_acceptance(const AcceptanceOptions& opts);

}  // namespace heatlands
