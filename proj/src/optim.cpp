#include "panelkit/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace panelkit {

namespace {

constexpr double kClipThreshold = 1e-12;

void validate_problem(const SimplexLSProblem& p) {
  if (p.design.rows() < 1 || p.design.cols() < 1)
    throw ConfigError("simplex LS: design needs at least one row and one column");
  if (p.target.size() != p.design.rows())
    throw DimensionError("simplex LS: target length " + std::to_string(p.target.size()) +
                         " does not match design rows " + std::to_string(p.design.rows()));
  if (!p.design.allFinite() || !p.target.allFinite())
    throw ConfigError("simplex LS: design and target must be finite");
  if (!(p.ridge_penalty >= 0.0))
    throw ConfigError("simplex LS: ridge penalty must be nonnegative");
}

// Column-centred view of the data; centring concentrates the intercept out.
struct CentredData {
  Eigen::MatrixXd design;
  Eigen::VectorXd target;
  Eigen::RowVectorXd design_means;
  double target_mean = 0.0;
};

CentredData centre(const SimplexLSProblem& p) {
  CentredData d;
  if (p.with_intercept) {
    d.design_means = p.design.colwise().mean();
    d.target_mean = p.target.mean();
    d.design = p.design.rowwise() - d.design_means;
    d.target = p.target.array() - d.target_mean;
  } else {
    d.design_means = Eigen::RowVectorXd::Zero(p.design.cols());
    d.design = p.design;
    d.target = p.target;
  }
  return d;
}

double centred_objective(const CentredData& d, double zeta, const Eigen::VectorXd& w) {
  const double n = static_cast<double>(d.design.rows());
  return (d.design * w - d.target).squaredNorm() / n + zeta * zeta * w.squaredNorm();
}

// Gradient of the concentrated objective and the Frank-Wolfe vertex/gap.
struct GapInfo {
  Eigen::VectorXd grad;
  Eigen::Index fw_vertex = 0;
  double gap = 0.0;
};

GapInfo gap_info(const CentredData& d, double zeta, const Eigen::VectorXd& w) {
  GapInfo g;
  const double n = static_cast<double>(d.design.rows());
  g.grad = (2.0 / n) * (d.design.transpose() * (d.design * w - d.target)) +
           (2.0 * zeta * zeta) * w;
  for (Eigen::Index i = 1; i < g.grad.size(); ++i)
    if (g.grad[i] < g.grad[g.fw_vertex]) g.fw_vertex = i;  // lowest index wins ties
  g.gap = g.grad.dot(w) - g.grad[g.fw_vertex];
  return g;
}

Eigen::VectorXd clip_and_renormalise(Eigen::VectorXd w) {
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] < kClipThreshold) w[i] = 0.0;
  const double total = w.sum();
  if (total > 0.0) w /= total;
  return w;
}

double concentrated_intercept(const SimplexLSProblem& p, const CentredData& d,
                              const Eigen::VectorXd& w) {
  return p.with_intercept ? d.target_mean - d.design_means.dot(w) : 0.0;
}

// Exact minimiser of the restricted problem on the face spanned by `support`
// (weights outside the support stay zero). Classic NNLS-style inner loop:
// solve the sum-to-one equality problem on the current support via the
// bordered KKT system, step toward it until a nonnegativity bound blocks,
// drop the blocking coordinates, repeat. Descends monotonically and finishes
// in at most |support| rounds.
Eigen::VectorXd corrective_solve(const CentredData& d, double zeta,
                                 std::vector<Eigen::Index> support,
                                 const Eigen::VectorXd& start) {
  const double n = static_cast<double>(d.design.rows());
  const double zeta2 = zeta * zeta;
  Eigen::VectorXd w = start;

  for (std::size_t round = 0; round <= static_cast<std::size_t>(start.size()) + 1; ++round) {
    const std::size_t m = support.size();
    if (m == 0) break;
    if (m == 1) {
      w.setZero();
      w[support[0]] = 1.0;
      return w;
    }

    // Bordered KKT: [H 1; 1' 0] [v; nu] = [c; 1] with H = (2/n) A'A + 2 zeta^2 I.
    Eigen::MatrixXd sub(d.design.rows(), m);
    for (std::size_t j = 0; j < m; ++j) sub.col(static_cast<Eigen::Index>(j)) = d.design.col(support[j]);
    Eigen::MatrixXd kkt(m + 1, m + 1);
    kkt.setZero();
    kkt.topLeftCorner(m, m) = (2.0 / n) * (sub.transpose() * sub);
    kkt.topLeftCorner(m, m).diagonal().array() += 2.0 * zeta2;
    kkt.topRightCorner(m, 1).setOnes();
    kkt.bottomLeftCorner(1, m).setOnes();
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = (2.0 / n) * (sub.transpose() * d.target);
    rhs[static_cast<Eigen::Index>(m)] = 1.0;

    // Rank-revealing solve: the system is consistent even when the ridge-free
    // Hessian is singular, and full pivoting keeps the pick deterministic.
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    Eigen::VectorXd candidate = sol.head(m);
    if (!candidate.allFinite()) break;  // degenerate face; caller falls back

    bool feasible = true;
    for (std::size_t j = 0; j < m; ++j)
      if (candidate[static_cast<Eigen::Index>(j)] < 0.0) feasible = false;
    if (feasible) {
      w.setZero();
      for (std::size_t j = 0; j < m; ++j) w[support[j]] = candidate[static_cast<Eigen::Index>(j)];
      return w;
    }

    // Step from w toward the candidate until the first coordinate hits zero.
    double alpha = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double from = w[support[j]];
      const double to = candidate[static_cast<Eigen::Index>(j)];
      if (to < 0.0 && from > to) alpha = std::min(alpha, from / (from - to));
    }
    std::vector<Eigen::Index> next;
    Eigen::VectorXd stepped = Eigen::VectorXd::Zero(w.size());
    for (std::size_t j = 0; j < m; ++j) {
      const double from = w[support[j]];
      const double to = candidate[static_cast<Eigen::Index>(j)];
      const double value = from + alpha * (to - from);
      if (value > kClipThreshold) {
        stepped[support[j]] = value;
        next.push_back(support[j]);
      }
    }
    if (next.size() == m) break;  // nothing dropped; avoid cycling
    w = stepped;
    support = std::move(next);
  }
  return w;
}

}  // namespace

WeightVector solve_simplex_ls(const SimplexLSProblem& p, const SolverSettings& s,
                              SolveDiagnostics& diag) {
  validate_problem(p);
  if (s.max_iterations < 0) throw ConfigError("simplex LS: max_iterations must be >= 0");
  if (!(s.tolerance >= 0.0)) throw ConfigError("simplex LS: tolerance must be >= 0");

  const Eigen::Index k = p.design.cols();
  const double n = static_cast<double>(p.design.rows());
  CentredData d = centre(p);

  // Normalise to unit scale internally: the argmin is unchanged when design,
  // target, and ridge shrink together, the KKT systems stay well conditioned,
  // and the stopping rule keeps its original-units meaning through the s^2
  // factor on the gap.
  const double scale = std::max({1.0, d.design.cwiseAbs().maxCoeff(),
                                 d.target.size() > 0 ? d.target.cwiseAbs().maxCoeff() : 0.0});
  d.design /= scale;
  d.target /= scale;
  const double zeta = p.ridge_penalty / scale;
  const double zeta2 = zeta * zeta;
  const double units = scale * scale;  // scaled objective/gap -> original units

  Eigen::VectorXd w = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  diag = SolveDiagnostics{};
  diag.objective_trace.push_back(units * centred_objective(d, zeta, w));

  for (int it = 0;; ++it) {
    const GapInfo g = gap_info(d, zeta, w);
    if (units * g.gap <= s.tolerance) {
      // Clipping perturbs the point by at most ~1e-12 per coordinate; on the
      // rare occasion that breaks the certificate, keep iterating from the
      // cleaned point instead of returning an uncertified result.
      Eigen::VectorXd cleaned = clip_and_renormalise(w);
      const GapInfo gc = gap_info(d, zeta, cleaned);
      if (units * gc.gap <= s.tolerance) {
        diag.iterations = it;
        diag.final_gap = units * gc.gap;
        WeightVector out;
        out.weights = std::move(cleaned);
        out.intercept = concentrated_intercept(p, d, out.weights);
        return out;
      }
      w = std::move(cleaned);
      continue;  // gradient is stale at the cleaned point
    }
    if (it >= s.max_iterations)
      throw ConvergenceError("simplex LS solver exhausted its iteration budget",
                             units * centred_objective(d, zeta, w), units * g.gap);

    const double f_before = centred_objective(d, zeta, w);

    // Fully corrective round: bring the Frank-Wolfe vertex into the support
    // and minimise exactly over that face.
    std::vector<Eigen::Index> support;
    bool has_fw = false;
    for (Eigen::Index i = 0; i < k; ++i)
      if (w[i] > 0.0 || i == g.fw_vertex) {
        support.push_back(i);
        has_fw = has_fw || i == g.fw_vertex;
      }
    (void)has_fw;
    const Eigen::VectorXd corrected = corrective_solve(d, zeta, support, w);
    const double f_corrected = centred_objective(d, zeta, corrected);
    if (f_corrected < f_before) {
      w = corrected;
      diag.objective_trace.push_back(units * f_corrected);
      continue;
    }

    // Fallback: a pairwise vertex step, which always makes strict progress
    // while the gap certificate is open. Mass moves from the worst
    // in-support vertex to the Frank-Wolfe vertex under exact line search.
    Eigen::Index away = -1;
    for (Eigen::Index i = 0; i < k; ++i)
      if (w[i] > 0.0 && (away < 0 || g.grad[i] > g.grad[away])) away = i;
    const double gain = g.grad[away] - g.grad[g.fw_vertex];  // >= gap > 0
    const double gamma_max = w[away];
    const Eigen::VectorXd step_cols = d.design.col(g.fw_vertex) - d.design.col(away);
    const double q = step_cols.squaredNorm() / n + 2.0 * zeta2;
    const double gamma = q > 0.0 ? std::min(gamma_max, gain / (2.0 * q)) : gamma_max;
    w[g.fw_vertex] += gamma;
    w[away] -= gamma;
    if (gamma == gamma_max) w[away] = 0.0;  // drop step, exact zero
    if (w[away] < 0.0) w[away] = 0.0;
    diag.objective_trace.push_back(units * centred_objective(d, zeta, w));
  }
}

WeightVector solve_simplex_ls(const SimplexLSProblem& p, const SolverSettings& s) {
  SolveDiagnostics diag;
  return solve_simplex_ls(p, s, diag);
}

double objective(const SimplexLSProblem& p, const WeightVector& candidate) {
  validate_problem(p);
  if (candidate.weights.size() != p.design.cols())
    throw DimensionError("objective: weight length " +
                         std::to_string(candidate.weights.size()) +
                         " does not match design columns " +
                         std::to_string(p.design.cols()));
  const double n = static_cast<double>(p.design.rows());
  Eigen::VectorXd resid = p.design * candidate.weights - p.target;
  resid.array() += candidate.intercept;
  return resid.squaredNorm() / n +
         p.ridge_penalty * p.ridge_penalty * candidate.weights.squaredNorm();
}

double min_vertex_directional_derivative(const SimplexLSProblem& p,
                                         const WeightVector& candidate) {
  validate_problem(p);
  if (candidate.weights.size() != p.design.cols())
    throw DimensionError("gap check: weight length does not match design columns");
  const CentredData d = centre(p);
  const GapInfo g = gap_info(d, p.ridge_penalty, candidate.weights);
  return -g.gap;
}

}  // namespace panelkit
