#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace multibump {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Measured values against their thresholds, one line.
  std::string summary;
  nlohmann::json metrics;
};

/// 1..13 in order.
std::vector<int> criterion_ids();
std::string criterion_title(int id);

/// Runs one acceptance check at desk scale (N = 2, p = 3 unless the check
/// says otherwise). Throws ConfigError for an unknown id; numerical failures
/// inside a check are reported as a failed result.
CriterionResult run_criterion(int id);

}  // namespace multibump
