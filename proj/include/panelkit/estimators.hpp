#pragma once

#include <Eigen/Dense>

#include "panelkit/config.hpp"
#include "panelkit/optim.hpp"
#include "panelkit/panel.hpp"

/*
 * estimators.hpp
 * --------------
 * The three panel estimators of the average treatment effect on the treated:
 *
 *   did   uniform unit and time weights; the classic before/after change of
 *         treated minus controls.
 *   sc    synthetic control: simplex unit weights fitted to the treated pre
 *         trajectory with no intercept and no ridge; the effect is the raw
 *         post-period gap (no time differencing).
 *   sdid  synthetic difference-in-differences: ridge-regularised unit weights
 *         with an intercept, data-driven time weights over pre periods, and a
 *         double-differenced effect.
 *
 * Treated units enter as their cross-sectional mean trajectory throughout.
 */

namespace panelkit {

struct EstimateResult {
  double att = 0.0;
  WeightVector unit_weights;             // over control units, panel order
  WeightVector time_weights;             // over pre periods
  Eigen::VectorXd treated_trajectory;    // per-period mean of treated outcomes
  Eigen::VectorXd synthetic_trajectory;  // per-period weighted control outcomes
  double pre_fit_rmse = 0.0;             // fit residual over pre periods, intercept removed
  AnalysisConfig config_echo;
};

EstimateResult estimate(const Panel& panel, EstimatorKind kind,
                        const AnalysisConfig& config);

// The shared effect formula. For did and sdid:
//   (treated post mean - synthetic post mean)
//     - sum_t lambda_t * (treated_t - synthetic_t)  over pre periods;
// sc drops the pre-period term. estimate() stores exactly this value, so a
// result can be recomputed from its trajectories and weights.
double att_from_trajectories(EstimatorKind kind, const Eigen::VectorXd& treated,
                             const Eigen::VectorXd& synthetic,
                             const Eigen::VectorXd& time_weights, Eigen::Index t0);

// att / baseline, dimensionless. baseline must be positive.
double relative_effect(const EstimateResult& result, double baseline);

// Data-driven sdid ridge: (N_treated * T_post)^(1/4) times the standard
// deviation of first differences of control outcomes over pre periods.
double sdid_unit_ridge(const Panel& panel);

}  // namespace panelkit
