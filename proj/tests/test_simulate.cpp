#include <doctest.h>

#include <cmath>

#include "panelkit/simulate.hpp"

using namespace panelkit;

TEST_CASE("zero-variance DGP with zero effect gives a constant panel") {
  DGPConfig config;
  config.n_controls = 3;
  config.n_treated = 2;
  config.n_pre = 2;
  config.n_post = 2;
  config.seed = 9;
  const Panel p = generate_panel(config);
  CHECK(p.n_units() == 5);
  CHECK(p.n_periods() == 4);
  CHECK(p.outcomes().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless DGP shifts exactly the treated post cells") {
  DGPConfig config;
  config.n_controls = 3;
  config.n_treated = 2;
  config.n_pre = 3;
  config.n_post = 2;
  config.true_att = 5.0;
  config.seed = 10;
  const Panel p = generate_panel(config);
  for (Eigen::Index i = 0; i < p.n_units(); ++i)
    for (Eigen::Index t = 0; t < p.n_periods(); ++t) {
      const bool bumped = p.treated_at(i) && t >= p.num_pre_periods();
      CHECK(p.outcomes()(i, t) == (bumped ? 5.0 : 0.0));
    }
}

TEST_CASE("same seed gives bit-identical panels, different seeds differ") {
  DGPConfig config;
  config.n_controls = 6;
  config.n_treated = 2;
  config.n_pre = 4;
  config.n_post = 2;
  config.unit_effect_sd = 1.0;
  config.time_effect_sd = 0.7;
  config.noise_sd = 0.5;
  config.factor_loading_sd = 0.3;
  config.true_att = 1.0;
  config.seed = 77;
  const Panel a = generate_panel(config);
  const Panel b = generate_panel(config);
  CHECK(a.outcomes() == b.outcomes());
  config.seed = 78;
  const Panel c = generate_panel(config);
  CHECK((a.outcomes() - c.outcomes()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generated panels satisfy the panel invariants") {
  DGPConfig config;
  config.n_controls = 4;
  config.n_treated = 3;
  config.n_pre = 2;
  config.n_post = 3;
  config.noise_sd = 2.0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    config.seed = seed;
    const Panel p = generate_panel(config);  // the constructor validates
    CHECK(p.n_treated() == 3);
    CHECK(p.num_pre_periods() == 2);
    CHECK(p.outcomes().allFinite());
  }
}

TEST_CASE("zero-noise Monte Carlo recovers the effect exactly") {
  DGPConfig config;
  config.n_controls = 5;
  config.n_treated = 2;
  config.n_pre = 3;
  config.n_post = 1;
  config.true_att = 4.0;
  config.seed = 3;
  AnalysisConfig analysis;
  analysis.replications = 20;
  analysis.t0 = config.n_pre;
  const MonteCarloSummary summary = run_monte_carlo(
      config, {EstimatorKind::did, EstimatorKind::sc, EstimatorKind::sdid}, 10, analysis);
  for (const auto& s : summary.estimators) {
    CHECK(s.bias == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.rmse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.ci_coverage == 1.0);
  }
}

TEST_CASE("did is unbiased under common trends (frozen seeded run)") {
  DGPConfig config;
  config.n_controls = 15;
  config.n_treated = 3;
  config.n_pre = 6;
  config.n_post = 1;
  config.unit_effect_sd = 1.0;
  config.time_effect_sd = 1.0;
  config.noise_sd = 1.0;
  config.factor_loading_sd = 0.0;  // common trends hold
  config.true_att = 2.0;
  config.seed = 314;
  AnalysisConfig analysis;
  analysis.replications = 25;
  analysis.seed = 42;
  const MonteCarloSummary summary =
      run_monte_carlo(config, {EstimatorKind::did}, 150, analysis);
  // Noise sd 1 over 150 reps puts the standard error of the mean near 0.03.
  CHECK(std::abs(summary.estimators[0].bias) <= 0.15);
}

TEST_CASE("sdid absorbs factor trends better than did (frozen seeded run)") {
  DGPConfig config;
  config.n_controls = 15;
  config.n_treated = 3;
  config.n_pre = 8;
  config.n_post = 1;
  config.unit_effect_sd = 1.0;
  config.time_effect_sd = 0.5;
  config.noise_sd = 0.3;
  config.factor_loading_sd = 1.5;  // strong interactive trends
  config.true_att = 2.0;
  config.seed = 2718;
  AnalysisConfig analysis;
  analysis.replications = 25;
  analysis.seed = 99;
  const MonteCarloSummary summary = run_monte_carlo(
      config, {EstimatorKind::did, EstimatorKind::sdid}, 120, analysis);
  const auto& did = summary.estimators[0];
  const auto& sdid = summary.estimators[1];
  CHECK(std::abs(sdid.bias) <= std::abs(did.bias));
  CHECK(sdid.rmse <= did.rmse);
}

TEST_CASE("mean sdid estimate is centred on zero when the effect is zero") {
  DGPConfig config;
  config.n_controls = 10;
  config.n_treated = 2;
  config.n_pre = 4;
  config.n_post = 1;
  config.noise_sd = 1.0;
  config.true_att = 0.0;
  config.seed = 1618;
  AnalysisConfig analysis;
  analysis.replications = 20;
  analysis.seed = 5;
  const int reps = 500;
  const MonteCarloSummary summary =
      run_monte_carlo(config, {EstimatorKind::sdid}, reps, analysis);
  const auto& s = summary.estimators[0];
  double ss = 0.0;
  for (const double e : s.estimates) ss += (e - s.mean_estimate) * (e - s.mean_estimate);
  const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
  const double t_stat = s.mean_estimate / (sd / std::sqrt(static_cast<double>(reps)));
  CHECK(std::abs(t_stat) < 2.5758293035489004);  // two-sided 1% critical value
}

TEST_CASE("monte carlo determinism and config validation") {
  DGPConfig config;
  config.n_controls = 5;
  config.n_treated = 2;
  config.n_pre = 3;
  config.n_post = 1;
  config.noise_sd = 1.0;
  config.true_att = 1.0;
  config.seed = 11;
  AnalysisConfig analysis;
  analysis.replications = 10;
  const MonteCarloSummary a = run_monte_carlo(config, {EstimatorKind::sdid}, 8, analysis);
  const MonteCarloSummary b = run_monte_carlo(config, {EstimatorKind::sdid}, 8, analysis);
  REQUIRE(a.estimators[0].estimates.size() == b.estimators[0].estimates.size());
  for (std::size_t i = 0; i < a.estimators[0].estimates.size(); ++i)
    CHECK(a.estimators[0].estimates[i] == b.estimators[0].estimates[i]);

  DGPConfig bad = config;
  bad.n_controls = 0;
  CHECK_THROWS_AS((void)generate_panel(bad), ConfigError);
  bad = config;
  bad.noise_sd = -1.0;
  CHECK_THROWS_AS((void)generate_panel(bad), ConfigError);
  CHECK_THROWS_AS((void)run_monte_carlo(config, {}, 5, analysis), ConfigError);
  CHECK_THROWS_AS((void)run_monte_carlo(config, {EstimatorKind::did}, 0, analysis),
                  ConfigError);
}
