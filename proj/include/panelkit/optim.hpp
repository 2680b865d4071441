#pragma once

#include <Eigen/Dense>
#include <vector>

#include "panelkit/errors.hpp"

/*
 * optim.hpp
 * ---------
 * Intercept-augmented, simplex-constrained, ridge-regularised least squares:
 *
 *   minimise  (1/n) * ||A w + a*1 - b||^2  +  zeta^2 * ||w||^2
 *   over      w in the probability simplex (w >= 0, sum w = 1),
 *             a free when with_intercept, fixed to 0 otherwise.
 *
 * This is the primitive behind synthetic-control unit weights and
 * synthetic-difference-in-differences time weights. The intercept is
 * concentrated out analytically: with it enabled the problem reduces to
 * plain simplex least squares on column-centred data, and the reported
 * intercept is mean(b) - colmeans(A)'w.
 */

namespace panelkit {

struct SimplexLSProblem {
  Eigen::MatrixXd design;      // rows = fitting dimension, cols = candidates
  Eigen::VectorXd target;      // one entry per design row
  double ridge_penalty = 0.0;  // zeta, >= 0
  bool with_intercept = false;
};

// Nonnegative weights summing to one, plus the concentrated intercept
// (0 when the problem has no intercept).
struct WeightVector {
  Eigen::VectorXd weights;
  double intercept = 0.0;
};

struct SolverSettings {
  int max_iterations = 10'000;
  double tolerance = 1e-8;  // on the Frank-Wolfe optimality gap
};

struct SolveDiagnostics {
  int iterations = 0;
  double final_gap = 0.0;
  std::vector<double> objective_trace;  // objective after each step
};

// Away-step Frank-Wolfe from the uniform start (deterministic, seed-free).
// Stops once the Frank-Wolfe gap drops below settings.tolerance; ties among
// vertices break toward the lowest column index. Weights below 1e-12 are
// clipped to zero and the vector renormalised before returning. Throws
// ConvergenceError when the iteration budget runs out first.
WeightVector solve_simplex_ls(const SimplexLSProblem& problem,
                              const SolverSettings& settings,
                              SolveDiagnostics& diagnostics);
WeightVector solve_simplex_ls(const SimplexLSProblem& problem,
                              const SolverSettings& settings = {});

// Exact objective value for a candidate, using the candidate's stored
// intercept. Pure; throws DimensionError on mismatched shapes.
double objective(const SimplexLSProblem& problem, const WeightVector& candidate);

// Smallest directional derivative of the (intercept-concentrated) objective
// toward any simplex vertex. Nonnegative iff the candidate is optimal; the
// solver certifies >= -tolerance at every returned point.
double min_vertex_directional_derivative(const SimplexLSProblem& problem,
                                         const WeightVector& candidate);

}  // namespace panelkit
