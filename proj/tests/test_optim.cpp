#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "panelkit/optim.hpp"
#include "panelkit/rng.hpp"

using namespace panelkit;

namespace {

Eigen::MatrixXd random_matrix(rng::SplitMix64& gen, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gen.gaussian();
  return m;
}

// Independent arithmetic oracle: plain loops, no shared code with objective().
double naive_objective(const SimplexLSProblem& p, const Eigen::VectorXd& w,
                       double intercept) {
  double rss = 0.0;
  for (Eigen::Index r = 0; r < p.design.rows(); ++r) {
    double fitted = intercept;
    for (Eigen::Index c = 0; c < p.design.cols(); ++c) fitted += p.design(r, c) * w[c];
    const double resid = fitted - p.target[r];
    rss += resid * resid;
  }
  double wnorm = 0.0;
  for (Eigen::Index c = 0; c < p.design.cols(); ++c) wnorm += w[c] * w[c];
  return rss / static_cast<double>(p.design.rows()) +
         p.ridge_penalty * p.ridge_penalty * wnorm;
}

double best_intercept(const SimplexLSProblem& p, const Eigen::VectorXd& w) {
  if (!p.with_intercept) return 0.0;
  return (p.target - p.design * w).mean();
}

// Brute-force oracle: grid over the 2-simplex at the given step.
double grid_search_optimum(const SimplexLSProblem& p, int steps) {
  REQUIRE(p.design.cols() == 3);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps - i; ++j) {
      Eigen::VectorXd w(3);
      w << static_cast<double>(i) / steps, static_cast<double>(j) / steps,
          static_cast<double>(steps - i - j) / steps;
      best = std::min(best, naive_objective(p, w, best_intercept(p, w)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("single column equal to target is represented exactly") {
  SimplexLSProblem p;
  p.design = Eigen::MatrixXd(4, 1);
  p.design << 1.0, 2.0, -3.0, 0.5;
  p.target = p.design.col(0);
  const WeightVector w = solve_simplex_ls(p);
  CHECK(w.weights.size() == 1);
  CHECK(w.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w.intercept == 0.0);
  CHECK(objective(p, w) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("identical columns split the weight evenly") {
  SimplexLSProblem p;
  p.design = Eigen::MatrixXd(3, 2);
  p.design << 1.0, 1.0, 2.0, 2.0, 3.0, 3.0;
  p.target = p.design.col(0);
  SUBCASE("ridge breaks the tie toward the minimum-norm point") { p.ridge_penalty = 0.3; }
  SUBCASE("zero ridge keeps the symmetric start") { p.ridge_penalty = 0.0; }
  const WeightVector w = solve_simplex_ls(p);
  CHECK(w.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("objective matches a naive re-implementation on random instances") {
  rng::SplitMix64 gen(101);
  for (int trial = 0; trial < 100; ++trial) {
    SimplexLSProblem p;
    const Eigen::Index rows = 2 + static_cast<Eigen::Index>(gen.below(6));
    const Eigen::Index cols = 1 + static_cast<Eigen::Index>(gen.below(5));
    p.design = random_matrix(gen, rows, cols);
    p.target = random_matrix(gen, rows, 1).col(0);
    p.ridge_penalty = gen.uniform01();
    WeightVector cand;
    Eigen::VectorXd raw = random_matrix(gen, cols, 1).col(0).array().abs();
    cand.weights = raw / raw.sum();
    cand.intercept = gen.gaussian();
    const double expected = naive_objective(p, cand.weights, cand.intercept);
    CHECK(objective(p, cand) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("objective example values") {
  SimplexLSProblem p;
  p.design = Eigen::MatrixXd(3, 2);
  p.design << 4.0, 4.0, 5.0, 5.0, 6.0, 6.0;
  p.target = p.design.col(0);

  WeightVector uniform;
  uniform.weights = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(objective(p, uniform) == doctest::Approx(0.0));  // identical columns fit exactly

  SimplexLSProblem single;
  single.design = p.design.leftCols(1);
  single.target = p.target;
  WeightVector one;
  one.weights = Eigen::VectorXd::Constant(1, 1.0);
  CHECK(objective(p, uniform) == doctest::Approx(objective(single, one)).epsilon(1e-15));

  WeightVector wrong;
  wrong.weights = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  CHECK_THROWS_AS((void)objective(p, wrong), DimensionError);
}

TEST_CASE("solver beats the grid oracle and certifies optimality") {
  rng::SplitMix64 gen(2024);
  for (int trial = 0; trial < 50; ++trial) {
    SimplexLSProblem p;
    const Eigen::Index rows = 3 + static_cast<Eigen::Index>(gen.below(5));
    p.design = random_matrix(gen, rows, 3);
    p.target = random_matrix(gen, rows, 1).col(0);
    p.ridge_penalty = 0.0;
    p.with_intercept = (trial % 2 == 0);

    SolveDiagnostics diag;
    const WeightVector w = solve_simplex_ls(p, {}, diag);
    const double grid_best = grid_search_optimum(p, 100);
    CHECK(objective(p, w) <= grid_best + 1e-4);
    CHECK(min_vertex_directional_derivative(p, w) >= -1e-8);
    CHECK(diag.final_gap <= 1e-8);

    // Weight vector invariants.
    CHECK(w.weights.minCoeff() >= 0.0);
    CHECK(w.weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("objective trace is non-increasing") {
  rng::SplitMix64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    SimplexLSProblem p;
    p.design = random_matrix(gen, 6, 4);
    p.target = random_matrix(gen, 6, 1).col(0);
    p.ridge_penalty = trial % 2 == 0 ? 0.0 : 0.05;
    p.with_intercept = trial % 3 == 0;
    SolveDiagnostics diag;
    (void)solve_simplex_ls(p, {}, diag);
    for (std::size_t i = 1; i < diag.objective_trace.size(); ++i) {
      const double slack = 1e-12 * (1.0 + std::abs(diag.objective_trace[i - 1]));
      CHECK(diag.objective_trace[i] <= diag.objective_trace[i - 1] + slack);
    }
  }
}

TEST_CASE("identical inputs give bit-identical outputs") {
  rng::SplitMix64 gen(55);
  SimplexLSProblem p;
  p.design = random_matrix(gen, 8, 5);
  p.target = random_matrix(gen, 8, 1).col(0);
  p.ridge_penalty = 0.1;
  p.with_intercept = true;
  const WeightVector a = solve_simplex_ls(p);
  const WeightVector b = solve_simplex_ls(p);
  REQUIRE(a.weights.size() == b.weights.size());
  for (Eigen::Index i = 0; i < a.weights.size(); ++i) CHECK(a.weights[i] == b.weights[i]);
  CHECK(a.intercept == b.intercept);
}

TEST_CASE("scaling design, target, and ridge by the same constant keeps the argmin") {
  rng::SplitMix64 gen(99);
  for (int trial = 0; trial < 20; ++trial) {
    SimplexLSProblem p;
    p.design = random_matrix(gen, 6, 4);
    p.target = random_matrix(gen, 6, 1).col(0);
    p.ridge_penalty = 0.2;
    p.with_intercept = trial % 2 == 0;
    SimplexLSProblem scaled = p;
    const double c = 2.0;  // power of two keeps the arithmetic path exact
    scaled.design *= c;
    scaled.target *= c;
    scaled.ridge_penalty *= c;
    const WeightVector a = solve_simplex_ls(p);
    const WeightVector b = solve_simplex_ls(scaled);
    for (Eigen::Index i = 0; i < a.weights.size(); ++i)
      CHECK(b.weights[i] == doctest::Approx(a.weights[i]).epsilon(1e-9));
  }
}

TEST_CASE("permuting columns permutes the weights") {
  rng::SplitMix64 gen(123);
  for (int trial = 0; trial < 20; ++trial) {
    SimplexLSProblem p;
    p.design = random_matrix(gen, 7, 5);
    p.target = random_matrix(gen, 7, 1).col(0);
    p.ridge_penalty = 0.15;  // unique argmin
    const std::vector<Eigen::Index> perm = {3, 0, 4, 1, 2};
    SimplexLSProblem q = p;
    for (std::size_t j = 0; j < perm.size(); ++j)
      q.design.col(static_cast<Eigen::Index>(j)) = p.design.col(perm[j]);
    const WeightVector a = solve_simplex_ls(p);
    const WeightVector b = solve_simplex_ls(q);
    for (std::size_t j = 0; j < perm.size(); ++j)
      CHECK(b.weights[static_cast<Eigen::Index>(j)] ==
            doctest::Approx(a.weights[perm[j]]).epsilon(1e-8));
  }
}

TEST_CASE("running out of iterations raises ConvergenceError with diagnostics") {
  rng::SplitMix64 gen(5);
  SimplexLSProblem p;
  p.design = random_matrix(gen, 6, 4);
  p.target = random_matrix(gen, 6, 1).col(0);
  SolverSettings s;
  s.max_iterations = 2;
  s.tolerance = 0.0;  // unreachable on a generic instance
  try {
    (void)solve_simplex_ls(p, s);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::isfinite(e.last_objective));
    CHECK(e.gap > 0.0);
  }
}

TEST_CASE("problem validation") {
  SimplexLSProblem p;
  p.design = Eigen::MatrixXd::Ones(3, 2);
  p.target = Eigen::VectorXd::Ones(2);  // wrong length
  CHECK_THROWS_AS((void)solve_simplex_ls(p), DimensionError);
  p.target = Eigen::VectorXd::Ones(3);
  p.ridge_penalty = -1.0;
  CHECK_THROWS_AS((void)solve_simplex_ls(p), ConfigError);
  p.ridge_penalty = 0.0;
  p.design(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)solve_simplex_ls(p), ConfigError);
}
