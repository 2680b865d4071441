// panelkit CLI: validate | estimate | plot-data | replicate | simulate
//
// Exit codes: 0 success, 1 data or configuration error, 2 convergence or
// inference error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "panelkit/json_io.hpp"
#include "panelkit/plot.hpp"
#include "panelkit/replicate.hpp"
#include "panelkit/version.hpp"

namespace {

using namespace panelkit;

struct CommonOptions {
  std::string input;
  std::string output;
  std::vector<std::string> columns;  // unit,period,outcome,treated override
  int t0 = 1;
  bool drop_unbalanced = false;
};

CsvSchema schema_from_columns(const std::vector<std::string>& columns) {
  CsvSchema schema;
  if (columns.empty()) return schema;
  if (columns.size() != 4)
    throw ConfigError("--columns needs exactly four names: unit,period,outcome,treated");
  schema.unit = columns[0];
  schema.period = columns[1];
  schema.outcome = columns[2];
  schema.treated = columns[3];
  return schema;
}

bool has_suffix(const std::string& text, const std::string& suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// CSV or panel-JSON input, decided by extension.
LoadReport load_input(const CommonOptions& opts) {
  if (has_suffix(opts.input, ".json")) {
    Panel panel = panel_from_json(parse_json_file(opts.input));
    if (opts.t0 != panel.num_pre_periods()) panel = panel.with_num_pre_periods(opts.t0);
    return LoadReport{std::move(panel), {}};
  }
  LoadOptions load;
  load.schema = schema_from_columns(opts.columns);
  load.num_pre_periods = opts.t0;
  load.drop_unbalanced = opts.drop_unbalanced;
  return load_panel_file(opts.input, load);
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    if (!contents.empty() && contents.back() != '\n') std::cout << '\n';
  } else {
    write_text_file(path, contents);
  }
}

void print_summary(const AnalysisOutput& out) {
  const Panel& p = out.panel;
  std::printf("panel: %lld units × %lld periods, %lld treated, %lld control (T0=%d)\n",
              static_cast<long long>(p.n_units()), static_cast<long long>(p.n_periods()),
              static_cast<long long>(p.n_treated()), static_cast<long long>(p.n_controls()),
              p.num_pre_periods());
  const auto& cfg = out.result.config_echo;
  std::printf("estimator: %s, transform: %s\n", to_string(cfg.estimator).c_str(),
              to_string(cfg.transform).c_str());
  std::printf("att: %.4f", out.result.att);
  if (out.relative) std::printf("  (relative: %+.2f%%)", 100.0 * *out.relative);
  std::printf("\n");
  std::printf("placebo SE: %.4f  (%d replications, %d failed)\n",
              out.placebo.standard_error, out.placebo.replications, out.placebo.failures);
  for (const auto& ci : out.intervals)
    std::printf("%2.0f%% CI: [%.4f, %.4f]\n", 100.0 * ci.level, ci.lower, ci.upper);
  std::printf("time weights:");
  for (Eigen::Index t = 0; t < out.result.time_weights.weights.size(); ++t)
    std::printf(" %d: %.3f", p.periods()[static_cast<std::size_t>(t)],
                out.result.time_weights.weights[t]);
  std::printf("\n");
}

int run_validate(const CommonOptions& opts) {
  const LoadReport report = load_input(opts);
  const Panel& p = report.panel;
  std::printf("%lld units × %lld periods, %lld treated, %lld control\n",
              static_cast<long long>(p.n_units()), static_cast<long long>(p.n_periods()),
              static_cast<long long>(p.n_treated()), static_cast<long long>(p.n_controls()));
  std::printf("periods: %d..%d, T0=%d\n", p.periods().front(), p.periods().back(),
              p.num_pre_periods());
  std::printf("balance: ok\n");
  if (!report.dropped_units.empty()) {
    std::printf("dropped unbalanced units:");
    for (const auto& u : report.dropped_units) std::printf(" %s", u.c_str());
    std::printf("\n");
  }
  if (!opts.output.empty()) emit(opts.output, panel_to_json(p).dump(2) + "\n");
  return 0;
}

struct EstimateOptions {
  CommonOptions common;
  std::string estimator = "sdid";
  std::string transform = "none";
  std::vector<std::string> treated;
  int replications = 400;
  std::uint64_t seed = 20250727ULL;
  std::vector<double> ci_levels;
  int max_iterations = 10'000;
  double tolerance = 1e-8;
};

AnalysisConfig make_config(const EstimateOptions& opts) {
  AnalysisConfig config;
  config.estimator = estimator_from_string(opts.estimator);
  config.transform = transform_from_string(opts.transform);
  config.t0 = opts.common.t0;
  if (!opts.treated.empty()) config.treated_subset = opts.treated;
  config.replications = opts.replications;
  config.seed = opts.seed;
  if (!opts.ci_levels.empty()) config.ci_levels = opts.ci_levels;
  config.solver.max_iterations = opts.max_iterations;
  config.solver.tolerance = opts.tolerance;
  config.drop_unbalanced = opts.common.drop_unbalanced;
  return config;
}

int run_estimate(const EstimateOptions& opts) {
  const LoadReport report = load_input(opts.common);
  const AnalysisConfig config = make_config(opts);
  const AnalysisOutput out = run_analysis(report.panel, config);
  print_summary(out);
  if (!report.dropped_units.empty()) {
    std::printf("dropped unbalanced units:");
    for (const auto& u : report.dropped_units) std::printf(" %s", u.c_str());
    std::printf("\n");
  }
  if (!opts.common.output.empty())
    emit(opts.common.output, build_estimate_bundle(out, report.dropped_units).dump(2) + "\n");
  return 0;
}

int run_plot_data(const std::string& input, const std::string& output,
                  const std::string& format) {
  const FigureSeries fig = figure_series_from_bundle(parse_json_file(input));
  if (format == "svg")
    emit(output, figure_to_svg(fig));
  else
    emit(output, figure_to_json(fig).dump(2) + "\n");
  return 0;
}

struct ReplicateOptions {
  std::string input;
  std::string output;
  std::string which = "all_hosts";
  std::vector<std::string> columns;
  std::uint64_t seed = 20250727ULL;
  int replications = 400;
};

int run_replicate(const ReplicateOptions& opts) {
  const CsvSchema schema = schema_from_columns(opts.columns);
  const std::string text = read_text_file(opts.input);
  std::istringstream stream(text);
  const auto records = parse_panel_csv(stream, schema, /*treated_required=*/false);
  const ReplicationOutput out = run_replication(
      records, replication_variant_from_string(opts.which), opts.seed, opts.replications);
  std::printf("variant: %s\n", to_string(out.which).c_str());
  print_summary(out.analysis);
  if (!out.dropped_units.empty()) {
    std::printf("dropped incomplete units:");
    for (const auto& u : out.dropped_units) std::printf(" %s", u.c_str());
    std::printf("\n");
  }
  if (!opts.output.empty()) emit(opts.output, replication_to_json(out).dump(2) + "\n");
  return 0;
}

int run_simulate(const std::string& input, const std::string& output,
                 std::uint64_t seed, bool seed_given) {
  SimulationSpec spec = simulation_spec_from_json(parse_json_file(input));
  if (seed_given) spec.dgp.seed = seed;
  const MonteCarloSummary summary =
      run_monte_carlo(spec.dgp, spec.estimators, spec.reps, spec.analysis);
  std::fputs(monte_carlo_to_table(summary).c_str(), stdout);
  if (!output.empty()) emit(output, monte_carlo_to_json(summary).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("panelkit ") + panelkit::kVersion +
               " — panel treatment-effect estimation (did / sc / sdid)"};
  app.require_subcommand(1);

  CommonOptions validate_opts;
  auto* validate = app.add_subcommand("validate", "check a long CSV panel and report its shape");
  validate->add_option("--input", validate_opts.input, "long CSV or panel JSON")->required();
  validate->add_option("--output", validate_opts.output, "write the parsed panel as JSON");
  validate->add_option("--columns", validate_opts.columns,
                       "column names as unit,period,outcome,treated")->delimiter(',');
  validate->add_option("--t0", validate_opts.t0, "number of pre periods");
  validate->add_flag("--drop-unbalanced", validate_opts.drop_unbalanced,
                     "drop and report units with incomplete series");

  EstimateOptions est_opts;
  auto* estimate = app.add_subcommand("estimate", "run one estimator with placebo inference");
  estimate->add_option("--input", est_opts.common.input, "long CSV or panel JSON")->required();
  estimate->add_option("--output", est_opts.common.output, "result bundle JSON path");
  estimate->add_option("--columns", est_opts.common.columns,
                       "column names as unit,period,outcome,treated")->delimiter(',');
  estimate->add_option("--t0", est_opts.common.t0, "number of pre periods")->required();
  estimate->add_option("--estimator", est_opts.estimator, "did, sc, or sdid")
      ->check(CLI::IsMember({"did", "sc", "sdid"}));
  estimate->add_option("--transform", est_opts.transform, "none, demean_pre, or growth")
      ->check(CLI::IsMember({"none", "demean_pre", "growth"}));
  estimate->add_option("--treated", est_opts.treated,
                       "restrict the treated group to these units (repeatable)");
  estimate->add_option("--replications", est_opts.replications, "placebo replications");
  estimate->add_option("--seed", est_opts.seed, "RNG seed");
  estimate->add_option("--ci-level", est_opts.ci_levels,
                       "confidence level in (0,1), repeatable");
  estimate->add_option("--max-iterations", est_opts.max_iterations, "solver budget");
  estimate->add_option("--tolerance", est_opts.tolerance, "solver optimality gap");
  estimate->add_flag("--drop-unbalanced", est_opts.common.drop_unbalanced,
                     "drop and report units with incomplete series");

  std::string plot_input, plot_output, plot_format = "json";
  auto* plot = app.add_subcommand("plot-data", "figure series from an estimate bundle");
  plot->add_option("--input", plot_input, "estimate bundle JSON")->required();
  plot->add_option("--output", plot_output, "output path (stdout when omitted)");
  plot->add_option("--format", plot_format, "json or svg")
      ->check(CLI::IsMember({"json", "svg"}));

  ReplicateOptions rep_opts;
  auto* replicate = app.add_subcommand(
      "replicate", "preconfigured host-city analyses of the July overnight-stay panel");
  replicate->add_option("--input", rep_opts.input, "long CSV covering the required years")
      ->required();
  replicate->add_option("--output", rep_opts.output, "result bundle JSON path");
  replicate->add_option("--which", rep_opts.which,
                        "all_hosts, main_hosts, expanded, or growth")
      ->check(CLI::IsMember({"all_hosts", "main_hosts", "expanded", "growth"}));
  replicate->add_option("--columns", rep_opts.columns,
                        "column names as unit,period,outcome,treated")->delimiter(',');
  replicate->add_option("--seed", rep_opts.seed, "RNG seed");
  replicate->add_option("--replications", rep_opts.replications, "placebo replications");

  std::string sim_input, sim_output;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo harness from a DGP config");
  simulate->add_option("--input", sim_input, "DGP config JSON")->required();
  simulate->add_option("--output", sim_output, "summary JSON path");
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "override the DGP seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*validate) return run_validate(validate_opts);
    if (*estimate) return run_estimate(est_opts);
    if (*plot) return run_plot_data(plot_input, plot_output, plot_format);
    if (*replicate) return run_replicate(rep_opts);
    if (*simulate) return run_simulate(sim_input, sim_output, sim_seed, sim_seed_opt->count() > 0);
  } catch (const panelkit::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const panelkit::InferenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const panelkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
