#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "panelkit/pipeline.hpp"
#include "panelkit/simulate.hpp"

/*
 * json_io.hpp
 * -----------
 * JSON schemas for pipelining between CLI subcommands. All documents carry a
 * schema_version field and are byte-stable for identical inputs (no
 * timestamps; nlohmann emits shortest round-trip doubles).
 */

namespace panelkit {

using ordered_json = nlohmann::ordered_json;

// { schema_version, units, periods, t0, treated_units, outcomes (row per unit) }
ordered_json panel_to_json(const Panel& panel);
Panel panel_from_json(const nlohmann::json& doc);

ordered_json analysis_config_to_json(const AnalysisConfig& config);

// The cmd-estimate document: config echo, panel summary, estimate (weights,
// trajectories), and inference (placebo atts, SE, intervals).
ordered_json build_estimate_bundle(const AnalysisOutput& output,
                                   const std::vector<std::string>& dropped_units);

// DGP harness config: { dgp: {...}, estimators: [...], reps, analysis: {...} }
struct SimulationSpec {
  DGPConfig dgp;
  std::vector<EstimatorKind> estimators;
  int reps = 1;
  AnalysisConfig analysis;
};
SimulationSpec simulation_spec_from_json(const nlohmann::json& doc);

ordered_json monte_carlo_to_json(const MonteCarloSummary& summary);
std::string monte_carlo_to_table(const MonteCarloSummary& summary);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);
nlohmann::json parse_json_file(const std::string& path);

}  // namespace panelkit
