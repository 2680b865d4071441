#include "panelkit/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "panelkit/version.hpp"

namespace panelkit {

namespace {

ordered_json meta_block() {
  ordered_json meta;
  meta["generator"] = std::string("panelkit ") + kVersion;
  return meta;
}

ordered_json weights_by_label(const std::vector<std::string>& labels,
                              const Eigen::VectorXd& weights) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    ordered_json entry;
    entry["unit"] = labels[static_cast<std::size_t>(i)];
    entry["weight"] = weights[i];
    out.push_back(std::move(entry));
  }
  return out;
}

ordered_json weights_by_period(const std::vector<int>& periods,
                               const Eigen::VectorXd& weights) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    ordered_json entry;
    entry["period"] = periods[static_cast<std::size_t>(i)];
    entry["weight"] = weights[i];
    out.push_back(std::move(entry));
  }
  return out;
}

ordered_json trajectory_json(const std::vector<int>& periods, const Eigen::VectorXd& values) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    ordered_json entry;
    entry["period"] = periods[static_cast<std::size_t>(i)];
    entry["value"] = values[i];
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

ordered_json panel_to_json(const Panel& panel) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["units"] = panel.units();
  doc["periods"] = panel.periods();
  doc["t0"] = panel.num_pre_periods();
  doc["treated_units"] = panel.treated_units();
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < panel.n_units(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < panel.n_periods(); ++j) row.push_back(panel.outcomes()(i, j));
    rows.push_back(std::move(row));
  }
  doc["outcomes"] = std::move(rows);
  return doc;
}

Panel panel_from_json(const nlohmann::json& doc) {
  try {
    const auto units = doc.at("units").get<std::vector<std::string>>();
    const auto periods = doc.at("periods").get<std::vector<int>>();
    const auto treated = doc.at("treated_units").get<std::vector<std::string>>();
    const int t0 = doc.at("t0").get<int>();
    const auto& rows = doc.at("outcomes");
    Eigen::MatrixXd outcomes(units.size(), periods.size());
    if (rows.size() != units.size())
      throw ParseError("panel JSON: outcomes row count does not match units");
    for (std::size_t i = 0; i < units.size(); ++i) {
      const auto& row = rows.at(i);
      if (row.size() != periods.size())
        throw ParseError("panel JSON: outcomes column count does not match periods");
      for (std::size_t j = 0; j < periods.size(); ++j)
        outcomes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            row.at(j).get<double>();
    }
    return Panel(units, periods, std::move(outcomes), treated, t0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("panel JSON: ") + e.what());
  }
}

ordered_json analysis_config_to_json(const AnalysisConfig& config) {
  ordered_json doc;
  doc["estimator"] = to_string(config.estimator);
  doc["transform"] = to_string(config.transform);
  doc["t0"] = config.t0;
  if (config.treated_subset)
    doc["treated_subset"] = *config.treated_subset;
  else
    doc["treated_subset"] = nullptr;
  doc["replications"] = config.replications;
  doc["seed"] = config.seed;
  doc["ci_levels"] = config.ci_levels;
  doc["solver"]["max_iterations"] = config.solver.max_iterations;
  doc["solver"]["tolerance"] = config.solver.tolerance;
  doc["drop_unbalanced"] = config.drop_unbalanced;
  return doc;
}

ordered_json build_estimate_bundle(const AnalysisOutput& output,
                                   const std::vector<std::string>& dropped_units) {
  const Panel& panel = output.panel;
  const EstimateResult& est = output.result;

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["meta"] = meta_block();
  doc["config"] = analysis_config_to_json(est.config_echo);

  ordered_json pj;
  pj["n_units"] = panel.n_units();
  pj["n_periods"] = panel.n_periods();
  pj["n_treated"] = panel.n_treated();
  pj["n_controls"] = panel.n_controls();
  pj["t0"] = panel.num_pre_periods();
  pj["periods"] = panel.periods();
  pj["treated_units"] = panel.treated_units();
  pj["dropped_units"] = dropped_units;
  doc["panel"] = std::move(pj);

  ordered_json ej;
  ej["att"] = est.att;
  if (output.relative)
    ej["relative_effect"] = *output.relative;
  else
    ej["relative_effect"] = nullptr;
  if (output.baseline)
    ej["baseline"] = *output.baseline;
  else
    ej["baseline"] = nullptr;
  ej["pre_fit_rmse"] = est.pre_fit_rmse;
  ej["unit_weights"] = weights_by_label(panel.control_units(), est.unit_weights.weights);
  ej["unit_intercept"] = est.unit_weights.intercept;
  const std::vector<int> pre_periods(panel.periods().begin(),
                                     panel.periods().begin() + panel.num_pre_periods());
  ej["time_weights"] = weights_by_period(pre_periods, est.time_weights.weights);
  ej["time_intercept"] = est.time_weights.intercept;
  ej["treated_trajectory"] = trajectory_json(panel.periods(), est.treated_trajectory);
  ej["synthetic_trajectory"] = trajectory_json(panel.periods(), est.synthetic_trajectory);
  doc["estimate"] = std::move(ej);

  ordered_json ij;
  ij["seed"] = output.placebo.seed;
  ij["requested_replications"] = output.placebo.requested_replications;
  ij["replications"] = output.placebo.replications;
  ij["failures"] = output.placebo.failures;
  ij["point_estimate"] = output.placebo.point_estimate;
  ij["standard_error"] = output.placebo.standard_error;
  ordered_json cis = ordered_json::array();
  for (const auto& ci : output.intervals) {
    ordered_json entry;
    entry["level"] = ci.level;
    entry["lower"] = ci.lower;
    entry["upper"] = ci.upper;
    cis.push_back(std::move(entry));
  }
  ij["confidence_intervals"] = std::move(cis);
  ij["placebo_atts"] = output.placebo.placebo_atts;
  doc["inference"] = std::move(ij);
  return doc;
}

SimulationSpec simulation_spec_from_json(const nlohmann::json& doc) {
  try {
    SimulationSpec spec;
    const auto& dgp = doc.at("dgp");
    spec.dgp.n_controls = dgp.at("n_controls").get<int>();
    spec.dgp.n_treated = dgp.at("n_treated").get<int>();
    spec.dgp.n_pre = dgp.at("n_pre").get<int>();
    spec.dgp.n_post = dgp.at("n_post").get<int>();
    spec.dgp.unit_effect_sd = dgp.value("unit_effect_sd", 0.0);
    spec.dgp.time_effect_sd = dgp.value("time_effect_sd", 0.0);
    spec.dgp.noise_sd = dgp.value("noise_sd", 0.0);
    spec.dgp.factor_loading_sd = dgp.value("factor_loading_sd", 0.0);
    spec.dgp.true_att = dgp.value("true_att", 0.0);
    spec.dgp.seed = dgp.value("seed", std::uint64_t{0});

    for (const auto& name : doc.at("estimators"))
      spec.estimators.push_back(estimator_from_string(name.get<std::string>()));
    spec.reps = doc.at("reps").get<int>();

    if (doc.contains("analysis")) {
      const auto& an = doc.at("analysis");
      spec.analysis.replications = an.value("replications", spec.analysis.replications);
      spec.analysis.seed = an.value("seed", spec.analysis.seed);
      if (an.contains("ci_levels"))
        spec.analysis.ci_levels = an.at("ci_levels").get<std::vector<double>>();
      if (an.contains("solver")) {
        const auto& solver = an.at("solver");
        spec.analysis.solver.max_iterations =
            solver.value("max_iterations", spec.analysis.solver.max_iterations);
        spec.analysis.solver.tolerance =
            solver.value("tolerance", spec.analysis.solver.tolerance);
      }
    }
    spec.analysis.t0 = spec.dgp.n_pre;
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("simulation config: ") + e.what());
  }
}

ordered_json monte_carlo_to_json(const MonteCarloSummary& summary) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["meta"] = meta_block();
  ordered_json dgp;
  dgp["n_controls"] = summary.dgp.n_controls;
  dgp["n_treated"] = summary.dgp.n_treated;
  dgp["n_pre"] = summary.dgp.n_pre;
  dgp["n_post"] = summary.dgp.n_post;
  dgp["unit_effect_sd"] = summary.dgp.unit_effect_sd;
  dgp["time_effect_sd"] = summary.dgp.time_effect_sd;
  dgp["noise_sd"] = summary.dgp.noise_sd;
  dgp["factor_loading_sd"] = summary.dgp.factor_loading_sd;
  dgp["true_att"] = summary.dgp.true_att;
  dgp["seed"] = summary.dgp.seed;
  doc["dgp"] = std::move(dgp);
  doc["reps"] = summary.reps;
  ordered_json rows = ordered_json::array();
  for (const auto& s : summary.estimators) {
    ordered_json row;
    row["estimator"] = to_string(s.estimator);
    row["bias"] = s.bias;
    row["rmse"] = s.rmse;
    row["ci_coverage"] = s.ci_coverage;
    row["mean_estimate"] = s.mean_estimate;
    rows.push_back(std::move(row));
  }
  doc["estimators"] = std::move(rows);
  return doc;
}

std::string monte_carlo_to_table(const MonteCarloSummary& summary) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %12s %12s %12s %12s\n", "estimator", "bias",
                "rmse", "coverage", "mean");
  out += line;
  for (const auto& s : summary.estimators) {
    std::snprintf(line, sizeof(line), "%-10s %12.4f %12.4f %12.3f %12.4f\n",
                  to_string(s.estimator).c_str(), s.bias, s.rmse, s.ci_coverage,
                  s.mean_estimate);
    out += line;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write \"" + path + "\"");
  out << contents;
}

nlohmann::json parse_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("\"" + path + "\": " + e.what());
  }
}

}  // namespace panelkit
