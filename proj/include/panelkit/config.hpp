#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "panelkit/optim.hpp"
#include "panelkit/panel.hpp"

/*
 * config.hpp
 * ----------
 * Run-level configuration shared by the estimators, the inference layer, and
 * the CLI.
 */

namespace panelkit {

enum class EstimatorKind { did, sc, sdid };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(std::string_view name);

struct AnalysisConfig {
  EstimatorKind estimator = EstimatorKind::sdid;
  TransformKind transform = TransformKind::none;
  int t0 = 1;  // pre-period count applied at load time
  std::optional<std::vector<std::string>> treated_subset;
  int replications = 400;  // placebo replications
  std::uint64_t seed = 20250727ULL;
  std::vector<double> ci_levels = {0.90, 0.95};
  SolverSettings solver{};
  // Diagnostic knob: forces the sdid unit-weight ridge instead of the
  // data-driven default. Leave unset for normal runs.
  std::optional<double> unit_ridge_override;
  bool drop_unbalanced = false;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

}  // namespace panelkit
