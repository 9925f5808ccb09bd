#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace advsharp {

struct CheckResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::vector<std::string> only;  // empty = every check
  std::uint64_t seed = 20240607;
};

// Names accepted by VerifyOptions::only, in run order.
const std::vector<std::string>& oracle_check_names();

// Runs the property/oracle suite on synthetic fixtures. Unknown names in
// `only` raise a Config error.
std::vector<CheckResult> run_oracle_suite(const VerifyOptions& options = {});

// {name: {pass, metric, tolerance, detail}}
nlohmann::json to_report(const std::vector<CheckResult>& results);

}  // namespace advsharp
