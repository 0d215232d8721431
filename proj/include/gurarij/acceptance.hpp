#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

// The acceptance suite: one check per criterion, tolerances fixed here.
namespace gurarij::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double time_limit = 0.0;  ///< seconds; 0 when the criterion has no runtime bound
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();
};

struct Options {
  std::uint64_t seed = 20240601;
  std::vector<int> only;  ///< criteria to run; empty runs all
};

using Callback = std::function<void(const CriterionResult&)>;

/// Runs the selected criteria in order. Criterion 10 (total runtime) is
/// evaluated last from the elapsed time of the whole run.
std::vector<CriterionResult> run(const Options& opts, const Callback& on_result = {});

/// "[PASS] 6 one-point extension bound (12.3 s): detail"
std::string format_line(const CriterionResult& r);

}  // namespace gurarij::acceptance
