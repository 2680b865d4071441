#include "panelkit/simulate.hpp"

#include <cmath>
#include <cstdio>

#include "panelkit/inference.hpp"
#include "panelkit/rng.hpp"

namespace panelkit {

void DGPConfig::validate() const {
  if (n_controls < 1 || n_treated < 1 || n_pre < 1 || n_post < 1)
    throw ConfigError("DGP counts must all be >= 1");
  if (unit_effect_sd < 0.0 || time_effect_sd < 0.0 || noise_sd < 0.0 ||
      factor_loading_sd < 0.0)
    throw ConfigError("DGP standard deviations must be >= 0");
}

Panel generate_panel(const DGPConfig& config) {
  config.validate();
  const int n_units = config.n_controls + config.n_treated;
  const int n_periods = config.n_pre + config.n_post;

  rng::SplitMix64 gen(config.seed);
  Eigen::VectorXd unit_effect(n_units);
  for (int i = 0; i < n_units; ++i) unit_effect[i] = config.unit_effect_sd * gen.gaussian();
  Eigen::VectorXd time_effect(n_periods);
  for (int t = 0; t < n_periods; ++t) time_effect[t] = config.time_effect_sd * gen.gaussian();
  Eigen::VectorXd loading(n_units);
  for (int i = 0; i < n_units; ++i) loading[i] = config.factor_loading_sd * gen.gaussian();
  Eigen::VectorXd factor(n_periods);
  double walk = 0.0;
  for (int t = 0; t < n_periods; ++t) {
    walk += gen.gaussian();
    factor[t] = walk;
  }

  std::vector<std::string> units;
  std::vector<std::string> treated;
  char name[16];
  for (int i = 0; i < config.n_controls; ++i) {
    std::snprintf(name, sizeof(name), "C%03d", i + 1);
    units.emplace_back(name);
  }
  for (int i = 0; i < config.n_treated; ++i) {
    std::snprintf(name, sizeof(name), "T%03d", i + 1);
    units.emplace_back(name);
    treated.emplace_back(name);
  }

  Eigen::MatrixXd y(n_units, n_periods);
  for (int i = 0; i < n_units; ++i) {
    const bool is_treated = i >= config.n_controls;
    for (int t = 0; t < n_periods; ++t) {
      double value = unit_effect[i] + time_effect[t] + loading[i] * factor[t] +
                     config.noise_sd * gen.gaussian();
      if (is_treated && t >= config.n_pre) value += config.true_att;
      y(i, t) = value;
    }
  }

  std::vector<int> periods(n_periods);
  for (int t = 0; t < n_periods; ++t) periods[static_cast<std::size_t>(t)] = t + 1;
  return Panel(std::move(units), std::move(periods), std::move(y), treated, config.n_pre);
}

MonteCarloSummary run_monte_carlo(const DGPConfig& dgp,
                                  const std::vector<EstimatorKind>& kinds, int reps,
                                  const AnalysisConfig& analysis) {
  dgp.validate();
  if (reps < 1) throw ConfigError("Monte Carlo needs reps >= 1");
  if (kinds.empty()) throw ConfigError("Monte Carlo needs at least one estimator");

  std::vector<EstimatorSummary> summaries(kinds.size());
  std::vector<int> covered(kinds.size(), 0);
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    summaries[k].estimator = kinds[k];
    summaries[k].estimates.reserve(static_cast<std::size_t>(reps));
  }

  for (int rep = 0; rep < reps; ++rep) {
    DGPConfig draw = dgp;
    draw.seed = rng::split_seed(dgp.seed, static_cast<std::uint64_t>(rep));
    const Panel panel = generate_panel(draw);
    AnalysisConfig config = analysis;
    config.seed = rng::split_seed(analysis.seed, static_cast<std::uint64_t>(rep));
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      try {
        const EstimateResult est = estimate(panel, kinds[k], config);
        const PlaceboDistribution dist = placebo_inference(panel, kinds[k], config);
        const ConfidenceInterval ci = confidence_interval(est.att, dist, 0.95);
        summaries[k].estimates.push_back(est.att);
        if (ci.lower <= dgp.true_att && dgp.true_att <= ci.upper) ++covered[k];
      } catch (const Error& e) {
        throw Error("replication " + std::to_string(rep) + " (" + to_string(kinds[k]) +
                    "): " + e.what());
      }
    }
  }

  for (std::size_t k = 0; k < kinds.size(); ++k) {
    auto& s = summaries[k];
    const double n = static_cast<double>(s.estimates.size());
    double mean = 0.0;
    double mse = 0.0;
    for (const double e : s.estimates) {
      mean += e;
      mse += (e - dgp.true_att) * (e - dgp.true_att);
    }
    mean /= n;
    mse /= n;
    s.mean_estimate = mean;
    s.bias = mean - dgp.true_att;
    s.rmse = std::sqrt(mse);
    s.ci_coverage = static_cast<double>(covered[k]) / n;
  }

  MonteCarloSummary out;
  out.dgp = dgp;
  out.reps = reps;
  out.estimators = std::move(summaries);
  return out;
}

}  // namespace panelkit
