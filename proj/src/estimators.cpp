#include "panelkit/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace panelkit {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::did: return "did";
    case EstimatorKind::sc: return "sc";
    case EstimatorKind::sdid: return "sdid";
  }
  return "sdid";
}

EstimatorKind estimator_from_string(std::string_view name) {
  if (name == "did") return EstimatorKind::did;
  if (name == "sc") return EstimatorKind::sc;
  if (name == "sdid") return EstimatorKind::sdid;
  throw ConfigError("unknown estimator \"" + std::string(name) +
                    "\" (expected did, sc, or sdid)");
}

void AnalysisConfig::validate() const {
  if (t0 < 1) throw ConfigError("t0 must be >= 1");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (ci_levels.empty()) throw ConfigError("at least one confidence level is required");
  for (const double level : ci_levels)
    if (!(level > 0.0 && level < 1.0))
      throw ConfigError("confidence levels must lie strictly between 0 and 1");
  if (solver.max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(solver.tolerance >= 0.0)) throw ConfigError("solver tolerance must be >= 0");
  if (unit_ridge_override && !(*unit_ridge_override >= 0.0))
    throw ConfigError("unit ridge override must be >= 0");
  if (treated_subset && treated_subset->empty())
    throw ConfigError("treated subset must not be empty when given");
}

namespace {

WeightVector uniform_weights(Eigen::Index k) {
  WeightVector w;
  w.weights = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  w.intercept = 0.0;
  return w;
}

// Sample sd of pooled first differences of control outcomes over pre periods.
double control_first_diff_sd(const Panel& panel) {
  const Eigen::Index t0 = panel.num_pre_periods();
  if (t0 < 2) return 0.0;
  const auto controls = panel.control_indices();
  const Eigen::MatrixXd pre = panel.outcomes()(controls, Eigen::all).leftCols(t0);
  const Eigen::MatrixXd diffs = pre.rightCols(t0 - 1) - pre.leftCols(t0 - 1);
  const Eigen::Index m = diffs.size();
  if (m < 2) return 0.0;
  const double mean = diffs.mean();
  const double ss = (diffs.array() - mean).matrix().squaredNorm();
  return std::sqrt(ss / static_cast<double>(m - 1));
}

// The solver's gap tolerance is absolute while gradient rounding noise grows
// with the square of the data scale, so estimator subproblems measure the
// tolerance on their own (concentrated) scale. This also keeps results
// invariant to level shifts and unit changes of the outcome.
SolverSettings scale_adjusted(SolverSettings base, const SimplexLSProblem& p) {
  double s = 1.0;
  if (p.with_intercept) {
    const Eigen::MatrixXd centred = p.design.rowwise() - p.design.colwise().mean();
    s = std::max(s, centred.cwiseAbs().maxCoeff());
    s = std::max(s, (p.target.array() - p.target.mean()).abs().maxCoeff());
  } else {
    s = std::max({s, p.design.cwiseAbs().maxCoeff(), p.target.cwiseAbs().maxCoeff()});
  }
  base.tolerance *= s * s;
  return base;
}

}  // namespace

double sdid_unit_ridge(const Panel& panel) {
  const double scale = std::pow(
      static_cast<double>(panel.n_treated() * panel.n_post_periods()), 0.25);
  return scale * control_first_diff_sd(panel);
}

EstimateResult estimate(const Panel& panel, EstimatorKind kind,
                        const AnalysisConfig& config) {
  const auto controls = panel.control_indices();
  const auto treated = panel.treated_indices();
  if (controls.empty() || treated.empty())
    throw ConfigError("estimation needs at least one control and one treated unit");
  const Eigen::Index t0 = panel.num_pre_periods();
  const Eigen::Index t1 = panel.n_post_periods();
  if (t0 < 1 || t1 < 1)
    throw ConfigError("estimation needs at least one pre and one post period");

  const Eigen::MatrixXd ctrl = panel.outcomes()(controls, Eigen::all);
  const Eigen::VectorXd treated_mean =
      panel.outcomes()(treated, Eigen::all).colwise().mean().transpose();
  const Eigen::MatrixXd ctrl_pre = ctrl.leftCols(t0);

  WeightVector unit_w;
  WeightVector time_w;
  switch (kind) {
    case EstimatorKind::did:
      unit_w = uniform_weights(static_cast<Eigen::Index>(controls.size()));
      time_w = uniform_weights(t0);
      break;
    case EstimatorKind::sc: {
      SimplexLSProblem problem;
      problem.design = ctrl_pre.transpose();
      problem.target = treated_mean.head(t0);
      problem.ridge_penalty = 0.0;
      problem.with_intercept = false;
      unit_w = solve_simplex_ls(problem, scale_adjusted(config.solver, problem));
      time_w = uniform_weights(t0);  // reported for symmetry; sc ignores them
      break;
    }
    case EstimatorKind::sdid: {
      const double noise = control_first_diff_sd(panel);
      SimplexLSProblem unit_problem;
      unit_problem.design = ctrl_pre.transpose();
      unit_problem.target = treated_mean.head(t0);
      unit_problem.ridge_penalty = config.unit_ridge_override.value_or(sdid_unit_ridge(panel));
      unit_problem.with_intercept = true;
      unit_w = solve_simplex_ls(unit_problem, scale_adjusted(config.solver, unit_problem));

      SimplexLSProblem time_problem;
      time_problem.design = ctrl_pre;
      time_problem.target = ctrl.rightCols(t1).rowwise().mean();
      time_problem.ridge_penalty = 1e-6 * noise;  // jitter against singular fits
      time_problem.with_intercept = true;
      time_w = solve_simplex_ls(time_problem, scale_adjusted(config.solver, time_problem));
      break;
    }
  }

  EstimateResult result;
  result.unit_weights = std::move(unit_w);
  result.time_weights = std::move(time_w);
  result.treated_trajectory = treated_mean;
  result.synthetic_trajectory = ctrl.transpose() * result.unit_weights.weights;
  result.att = att_from_trajectories(kind, result.treated_trajectory,
                                     result.synthetic_trajectory,
                                     result.time_weights.weights, t0);
  const Eigen::VectorXd pre_resid = result.treated_trajectory.head(t0) -
                                    result.synthetic_trajectory.head(t0) -
                                    Eigen::VectorXd::Constant(t0, result.unit_weights.intercept);
  result.pre_fit_rmse = std::sqrt(pre_resid.squaredNorm() / static_cast<double>(t0));
  result.config_echo = config;
  result.config_echo.estimator = kind;
  return result;
}

double att_from_trajectories(EstimatorKind kind, const Eigen::VectorXd& treated,
                             const Eigen::VectorXd& synthetic,
                             const Eigen::VectorXd& time_weights, Eigen::Index t0) {
  if (treated.size() != synthetic.size())
    throw DimensionError("trajectories differ in length");
  if (t0 < 1 || t0 >= treated.size())
    throw DimensionError("t0 must leave at least one pre and one post period");
  if (time_weights.size() != t0)
    throw DimensionError("time weights must have one entry per pre period");

  const Eigen::Index t1 = treated.size() - t0;
  const double post_gap = treated.tail(t1).mean() - synthetic.tail(t1).mean();
  if (kind == EstimatorKind::sc) return post_gap;
  const double pre_gap = time_weights.dot(treated.head(t0) - synthetic.head(t0));
  return post_gap - pre_gap;
}

double relative_effect(const EstimateResult& result, double baseline) {
  if (!(baseline > 0.0))
    throw DegenerateOutcomeError("relative effect needs a positive baseline, got " +
                                 std::to_string(baseline));
  return result.att / baseline;
}

}  // namespace panelkit
