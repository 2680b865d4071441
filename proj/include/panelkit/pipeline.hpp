#pragma once

#include <optional>
#include <vector>

#include "panelkit/config.hpp"
#include "panelkit/estimators.hpp"
#include "panelkit/inference.hpp"
#include "panelkit/panel.hpp"

/*
 * pipeline.hpp
 * ------------
 * One estimation run end to end: treated-subset restriction, outcome
 * transform, estimation, placebo inference, confidence intervals, and the
 * relative effect against the raw pre-period baseline.
 */

namespace panelkit {

struct AnalysisOutput {
  Panel panel;  // the transformed panel the estimator actually saw
  EstimateResult result;
  PlaceboDistribution placebo;
  std::vector<ConfidenceInterval> intervals;  // one per ci_level, ascending
  // Raw-scale treated pre mean and att/baseline; absent for growth panels,
  // where the effect is already dimensionless.
  std::optional<double> baseline;
  std::optional<double> relative;
};

AnalysisOutput run_analysis(const Panel& loaded, const AnalysisConfig& config);

}  // namespace panelkit
