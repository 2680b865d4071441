#pragma once

#include <cstdint>
#include <vector>

#include "panelkit/config.hpp"
#include "panelkit/estimators.hpp"
#include "panelkit/panel.hpp"

/*
 * simulate.hpp
 * ------------
 * Synthetic panel generator and Monte Carlo harness for checking the
 * estimators against a known truth:
 *
 *   y[i,t] = unit_i + time_t + loading_i * factor_t + noise[i,t]
 *            + true_att * 1[i treated, t post]
 *
 * unit, time, loading, and noise draws are Gaussian with the configured sds;
 * factor_t is a standard Gaussian random walk, so a nonzero loading sd breaks
 * the common-trend assumption. Everything is deterministic under the seed
 * (fixed draw order: unit effects, time effects, loadings, factor walk,
 * then noise row-major).
 */

namespace panelkit {

struct DGPConfig {
  int n_controls = 1;
  int n_treated = 1;
  int n_pre = 1;
  int n_post = 1;
  double unit_effect_sd = 0.0;
  double time_effect_sd = 0.0;
  double noise_sd = 0.0;
  double true_att = 0.0;
  double factor_loading_sd = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

Panel generate_panel(const DGPConfig& config);

struct EstimatorSummary {
  EstimatorKind estimator = EstimatorKind::sdid;
  double bias = 0.0;
  double rmse = 0.0;
  double ci_coverage = 0.0;  // share of 95% intervals containing true_att
  double mean_estimate = 0.0;
  std::vector<double> estimates;  // one per replication
};

struct MonteCarloSummary {
  DGPConfig dgp;
  int reps = 0;
  std::vector<EstimatorSummary> estimators;
};

// Replication r draws its panel from split_seed(dgp.seed, r) and its placebo
// stream from split_seed(analysis.seed, r); estimator errors propagate with
// the replication index attached.
MonteCarloSummary run_monte_carlo(const DGPConfig& dgp,
                                  const std::vector<EstimatorKind>& kinds, int reps,
                                  const AnalysisConfig& analysis);

}  // namespace panelkit
