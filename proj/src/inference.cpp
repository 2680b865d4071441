#include "panelkit/inference.hpp"

#include <algorithm>
#include <cmath>

#include "panelkit/rng.hpp"

namespace panelkit {

namespace {

double sample_sd(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (const double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

// Controls in canonical (lexicographic) order with their panel rows, so the
// draw stream does not depend on how the input file ordered its units.
struct CanonicalControls {
  std::vector<std::string> units;
  std::vector<Eigen::Index> rows;
};

CanonicalControls canonical_controls(const Panel& panel) {
  std::vector<std::pair<std::string, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < panel.n_units(); ++i)
    if (!panel.treated_at(i))
      pairs.emplace_back(panel.units()[static_cast<std::size_t>(i)], i);
  std::sort(pairs.begin(), pairs.end());
  CanonicalControls out;
  for (auto& [unit, row] : pairs) {
    out.units.push_back(std::move(unit));
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> placebo_assignments(const Panel& panel,
                                                          int replications,
                                                          std::uint64_t seed) {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  const CanonicalControls controls = canonical_controls(panel);
  const std::size_t n0 = controls.units.size();
  const std::size_t n1 = static_cast<std::size_t>(panel.n_treated());
  if (n0 <= n1)
    throw InferenceError("insufficient controls for placebo: " + std::to_string(n0) +
                         " controls vs " + std::to_string(n1) + " treated units");

  std::vector<std::vector<std::string>> draws;
  draws.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    rng::SplitMix64 gen(rng::split_seed(seed, static_cast<std::uint64_t>(r)));
    auto picks = rng::sample_without_replacement(gen, n0, n1);
    std::sort(picks.begin(), picks.end());
    std::vector<std::string> names;
    names.reserve(n1);
    for (const std::size_t idx : picks) names.push_back(controls.units[idx]);
    draws.push_back(std::move(names));
  }
  return draws;
}

PlaceboDistribution placebo_inference(const Panel& panel, EstimatorKind kind,
                                      const AnalysisConfig& config) {
  const auto draws = placebo_assignments(panel, config.replications, config.seed);

  PlaceboDistribution dist;
  dist.requested_replications = config.replications;
  dist.seed = config.seed;

  // Controls-only panel in canonical order; each draw re-labels treatment.
  const CanonicalControls controls = canonical_controls(panel);
  const Eigen::MatrixXd sub = panel.outcomes()(controls.rows, Eigen::all);

  dist.placebo_atts.reserve(draws.size());
  for (const auto& pseudo_treated : draws) {
    Panel placebo(controls.units, panel.periods(), sub, pseudo_treated,
                  panel.num_pre_periods());
    try {
      dist.placebo_atts.push_back(estimate(placebo, kind, config).att);
    } catch (const ConvergenceError&) {
      ++dist.failures;
    }
  }

  if (10 * dist.failures > config.replications)
    throw InferenceError("placebo inference: " + std::to_string(dist.failures) + " of " +
                             std::to_string(config.replications) +
                             " replications failed to converge",
                         dist.failures);

  dist.replications = static_cast<int>(dist.placebo_atts.size());
  dist.standard_error = sample_sd(dist.placebo_atts);
  dist.point_estimate = estimate(panel, kind, config).att;
  return dist;
}

ConfidenceInterval confidence_interval(double point, const PlaceboDistribution& dist,
                                       double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("confidence level must lie strictly between 0 and 1");
  if (!std::isfinite(dist.standard_error) || dist.standard_error < 0.0)
    throw ConfigError("standard error must be finite and nonnegative");
  const double z = normal_quantile(0.5 * (1.0 + level));
  return ConfidenceInterval{level, point - z * dist.standard_error,
                            point + z * dist.standard_error};
}

// Wichura (1988), algorithm AS 241, routine PPND16.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ConfigError("normal quantile needs p strictly between 0 and 1");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

}  // namespace panelkit
