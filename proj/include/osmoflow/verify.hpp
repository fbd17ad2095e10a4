#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "osmoflow/config.hpp"

namespace osmoflow {

// One verification criterion: a machine-checkable verdict plus the measured
// quantities behind it.  `values` holds numbers only — no timings — so a
// report is byte-identical across runs with the same config and seed;
// runtime budgets are folded into `passed`.
struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  std::map<std::string, double> values;
};

struct VerifyReport {
  std::vector<CriterionResult> results;
  bool all_passed() const;
};

// Names of the acceptance criteria, in battery order.
const std::vector<std::string>& acceptance_criteria();

// Run the acceptance battery (or the subset named in `only`) at `cfg`.
// Tolerances are pinned inside the runners.  `log`, when non-null, receives
// one "[PASS|FAIL] name: detail" line as each criterion finishes.  Unknown
// names in `only` throw std::invalid_argument.
VerifyReport run_acceptance(const RunConfig& cfg, std::ostream* log = nullptr,
                            const std::vector<std::string>& only = {});

nlohmann::json to_json(const VerifyReport& rep, const RunConfig& cfg);

}  // namespace osmoflow
