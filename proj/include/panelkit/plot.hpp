#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "panelkit/json_io.hpp"

/*
 * plot.hpp
 * --------
 * Figure data behind the result plots: treated and synthetic trajectories,
 * the counterfactual post segment (the synthetic change re-anchored at the
 * time-weighted treated pre level), time-weight bars, and confidence
 * whiskers. Renders either as a five-series JSON document or as a static
 * two-panel SVG.
 */

namespace panelkit {

struct FigureSeries {
  std::vector<int> periods;
  std::vector<double> treated;
  std::vector<double> synthetic;
  // Counterfactual segment from the lambda-weighted pre anchor to the post
  // period: att = observed treated post mean - cf_y1.
  double cf_x0 = 0.0, cf_y0 = 0.0;
  double cf_x1 = 0.0, cf_y1 = 0.0;
  std::vector<int> pre_periods;
  std::vector<double> time_weights;
  struct Whisker {
    double level = 0.0;
    double x = 0.0;            // post-period anchor
    double att_lower = 0.0;    // bounds on the effect
    double att_upper = 0.0;
    double outcome_lower = 0.0;  // cf_y1 + att bounds, outcome scale
    double outcome_upper = 0.0;
  };
  std::vector<Whisker> whiskers;
  double att = 0.0;
};

FigureSeries figure_series(const AnalysisOutput& output);

// Rebuilds the series from a cmd-estimate JSON document; malformed input
// raises ParseError.
FigureSeries figure_series_from_bundle(const nlohmann::json& bundle);

ordered_json figure_to_json(const FigureSeries& fig);
std::string figure_to_svg(const FigureSeries& fig);

}  // namespace panelkit
