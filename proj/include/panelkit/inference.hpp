#pragma once

#include <cstdint>
#include <vector>

#include "panelkit/config.hpp"
#include "panelkit/estimators.hpp"
#include "panelkit/panel.hpp"

/*
 * inference.hpp
 * -------------
 * Placebo inference: repeatedly mark a random subset of control units as
 * pseudo-treated (the genuinely treated units leave the panel), re-estimate,
 * and use the dispersion of the pseudo effects as a standard error. Gaussian
 * confidence intervals follow from that standard error.
 */

namespace panelkit {

struct PlaceboDistribution {
  std::vector<double> placebo_atts;  // one per successful replication
  int replications = 0;              // successful count, = placebo_atts.size()
  int requested_replications = 0;
  int failures = 0;  // replications dropped for non-convergence
  std::uint64_t seed = 0;
  double standard_error = 0.0;  // sample sd of placebo_atts, n-1 denominator
  double point_estimate = 0.0;  // att of the genuine assignment
};

struct ConfidenceInterval {
  double level = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Pseudo-treated unit sets for each replication, drawn without replacement
// over the canonically sorted control list; draw r uses the child stream
// split_seed(seed, r). Exposed so the draw policy itself is testable.
std::vector<std::vector<std::string>> placebo_assignments(const Panel& panel,
                                                          int replications,
                                                          std::uint64_t seed);

// Runs estimate() on every pseudo-treated panel plus once on the genuine
// assignment. Requires more controls than treated units; throws
// InferenceError when more than 10% of replications fail to converge.
PlaceboDistribution placebo_inference(const Panel& panel, EstimatorKind kind,
                                      const AnalysisConfig& config);

// point +- z_{(1+level)/2} * standard_error.
ConfidenceInterval confidence_interval(double point, const PlaceboDistribution& dist,
                                       double level);

// Standard normal quantile (Wichura's AS 241, ~1e-15 relative accuracy).
double normal_quantile(double p);

}  // namespace panelkit
