#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "density_engine/inversion_plan.hpp"
#include "json.hpp"

namespace rlb {

/// Outcome of one numeric check. `passed` is decided by the check itself:
/// observed <= threshold unless the detail states a band.
struct CheckReport {
  std::string check_id;
  bool passed = false;
  double observed = 0.0;
  double threshold = 0.0;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string detail;

  nlohmann::json to_json() const;
};

struct VerifyConfig {
  std::uint64_t seed = 42;
  std::vector<std::string> models = default_models();
  PlanOverrides plan;
  /// Sample size of the statistical checks.
  std::size_t paths = 10000;
  unsigned threads = 1;
  /// Multiplies the tables used by the normalization check (fault injection).
  double density_scale = 1.0;

  static std::vector<std::string> default_models();
};

/// Every check id, sorted.
const std::vector<std::string>& check_manifest();

/// models.* and length_law.* checks over the configured models.
std::vector<CheckReport> run_model_checks(const VerifyConfig& config);
/// density.* checks; empty when the model list is empty.
std::vector<CheckReport> run_density_checks(const VerifyConfig& config);
/// bridge_fixed.* checks; empty when the model list is empty.
std::vector<CheckReport> run_bridge_checks(const VerifyConfig& config);
/// bridge_random.* checks on Cauchy and Gaussian bridges with discrete lengths.
std::vector<CheckReport> run_random_bridge_checks(const VerifyConfig& config);

/// All of the above, sorted by check_id. An empty model list gives an empty report.
std::vector<CheckReport> run_all(const VerifyConfig& config);

bool all_passed(const std::vector<CheckReport>& reports);
nlohmann::json report_json(const std::vector<CheckReport>& reports, const VerifyConfig& config);

}  // namespace rlb
