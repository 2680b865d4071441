#include "panelkit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "panelkit/version.hpp"

namespace panelkit {

namespace {

FigureSeries assemble(const std::vector<int>& periods, const std::vector<double>& treated,
                      const std::vector<double>& synthetic,
                      const std::vector<int>& pre_periods,
                      const std::vector<double>& time_weights,
                      const std::vector<ConfidenceInterval>& intervals, double att) {
  FigureSeries fig;
  fig.periods = periods;
  fig.treated = treated;
  fig.synthetic = synthetic;
  fig.pre_periods = pre_periods;
  fig.time_weights = time_weights;
  fig.att = att;

  const std::size_t t0 = pre_periods.size();
  const std::size_t t1 = periods.size() - t0;

  double pre_anchor_x = 0.0, treated_pre = 0.0, synth_pre = 0.0;
  for (std::size_t t = 0; t < t0; ++t) {
    pre_anchor_x += time_weights[t] * periods[t];
    treated_pre += time_weights[t] * treated[t];
    synth_pre += time_weights[t] * synthetic[t];
  }
  double post_x = 0.0, synth_post = 0.0;
  for (std::size_t t = t0; t < periods.size(); ++t) {
    post_x += periods[t];
    synth_post += synthetic[t];
  }
  post_x /= static_cast<double>(t1);
  synth_post /= static_cast<double>(t1);

  fig.cf_x0 = pre_anchor_x;
  fig.cf_y0 = treated_pre;
  fig.cf_x1 = post_x;
  // Parallel to the synthetic change, re-anchored at the treated pre level.
  fig.cf_y1 = treated_pre + (synth_post - synth_pre);

  for (const auto& ci : intervals) {
    FigureSeries::Whisker w;
    w.level = ci.level;
    w.x = post_x;
    w.att_lower = ci.lower;
    w.att_upper = ci.upper;
    w.outcome_lower = fig.cf_y1 + ci.lower;
    w.outcome_upper = fig.cf_y1 + ci.upper;
    fig.whiskers.push_back(w);
  }
  return fig;
}

}  // namespace

FigureSeries figure_series(const AnalysisOutput& output) {
  const Panel& panel = output.panel;
  const EstimateResult& est = output.result;
  const std::size_t t0 = static_cast<std::size_t>(panel.num_pre_periods());
  std::vector<double> treated(est.treated_trajectory.begin(), est.treated_trajectory.end());
  std::vector<double> synthetic(est.synthetic_trajectory.begin(),
                                est.synthetic_trajectory.end());
  std::vector<double> weights(est.time_weights.weights.begin(),
                              est.time_weights.weights.end());
  const std::vector<int> pre(panel.periods().begin(), panel.periods().begin() + t0);
  return assemble(panel.periods(), treated, synthetic, pre, weights, output.intervals,
                  est.att);
}

FigureSeries figure_series_from_bundle(const nlohmann::json& bundle) {
  try {
    const auto& est = bundle.at("estimate");
    std::vector<int> periods;
    std::vector<double> treated, synthetic;
    for (const auto& point : est.at("treated_trajectory")) {
      periods.push_back(point.at("period").get<int>());
      treated.push_back(point.at("value").get<double>());
    }
    for (const auto& point : est.at("synthetic_trajectory"))
      synthetic.push_back(point.at("value").get<double>());
    if (synthetic.size() != treated.size())
      throw ParseError("estimate JSON: trajectory lengths differ");

    std::vector<int> pre_periods;
    std::vector<double> weights;
    for (const auto& entry : est.at("time_weights")) {
      pre_periods.push_back(entry.at("period").get<int>());
      weights.push_back(entry.at("weight").get<double>());
    }
    if (pre_periods.empty() || pre_periods.size() >= periods.size())
      throw ParseError("estimate JSON: time weights must cover the pre periods only");

    std::vector<ConfidenceInterval> intervals;
    for (const auto& entry : bundle.at("inference").at("confidence_intervals"))
      intervals.push_back(ConfidenceInterval{entry.at("level").get<double>(),
                                             entry.at("lower").get<double>(),
                                             entry.at("upper").get<double>()});
    return assemble(periods, treated, synthetic, pre_periods, weights, intervals,
                    est.at("att").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("estimate JSON: ") + e.what());
  }
}

ordered_json figure_to_json(const FigureSeries& fig) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  ordered_json series;

  ordered_json treated = ordered_json::array();
  ordered_json synthetic = ordered_json::array();
  for (std::size_t i = 0; i < fig.periods.size(); ++i) {
    treated.push_back({{"period", fig.periods[i]}, {"value", fig.treated[i]}});
    synthetic.push_back({{"period", fig.periods[i]}, {"value", fig.synthetic[i]}});
  }
  series["treated_trajectory"] = std::move(treated);
  series["synthetic_trajectory"] = std::move(synthetic);

  series["counterfactual_segment"] = ordered_json::array(
      {{{"x", fig.cf_x0}, {"y", fig.cf_y0}}, {{"x", fig.cf_x1}, {"y", fig.cf_y1}}});

  ordered_json bars = ordered_json::array();
  for (std::size_t i = 0; i < fig.pre_periods.size(); ++i)
    bars.push_back({{"period", fig.pre_periods[i]}, {"weight", fig.time_weights[i]}});
  series["time_weights"] = std::move(bars);

  ordered_json whiskers = ordered_json::array();
  for (const auto& w : fig.whiskers)
    whiskers.push_back({{"level", w.level},
                        {"x", w.x},
                        {"att_lower", w.att_lower},
                        {"att_upper", w.att_upper},
                        {"outcome_lower", w.outcome_lower},
                        {"outcome_upper", w.outcome_upper}});
  series["ci_whiskers"] = std::move(whiskers);

  doc["series"] = std::move(series);
  return doc;
}

// ---------------------------------------------------------------------------
// SVG rendering: trajectories on top, time-weight bars below.
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Scale {
  double in_lo, in_hi, out_lo, out_hi;
  double operator()(double v) const {
    const double span = in_hi - in_lo;
    const double t = span == 0.0 ? 0.5 : (v - in_lo) / span;
    return out_lo + t * (out_hi - out_lo);
  }
};

}  // namespace

std::string figure_to_svg(const FigureSeries& fig) {
  const double width = 760, height = 560;
  const double top_y0 = 40, top_y1 = 360;
  const double bot_y0 = 420, bot_y1 = 540;
  const double x0 = 70, x1 = 720;

  double lo = fig.treated[0], hi = fig.treated[0];
  auto fold = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (const double v : fig.treated) fold(v);
  for (const double v : fig.synthetic) fold(v);
  fold(fig.cf_y0);
  fold(fig.cf_y1);
  for (const auto& w : fig.whiskers) {
    fold(w.outcome_lower);
    fold(w.outcome_upper);
  }
  const double pad = (hi - lo) == 0.0 ? 1.0 : 0.06 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double pmin = fig.periods.front(), pmax = fig.periods.back();
  const Scale sx{pmin, pmax == pmin ? pmin + 1 : pmax, x0, x1};
  const Scale sy{lo, hi, top_y1, top_y0};  // SVG y grows downward

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " +
         fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto polyline = [&](const std::vector<double>& ys, const char* colour) {
    std::string pts;
    for (std::size_t i = 0; i < fig.periods.size(); ++i)
      pts += fmt(sx(fig.periods[i])) + "," + fmt(sy(ys[i])) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) +
           "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    for (std::size_t i = 0; i < fig.periods.size(); ++i)
      svg += "<circle cx=\"" + fmt(sx(fig.periods[i])) + "\" cy=\"" + fmt(sy(ys[i])) +
             "\" r=\"3\" fill=\"" + colour + "\"/>\n";
  };

  // Treatment boundary between the last pre and first post period.
  const std::size_t t0 = fig.pre_periods.size();
  const double boundary = 0.5 * (fig.periods[t0 - 1] + fig.periods[t0]);
  svg += "<line x1=\"" + fmt(sx(boundary)) + "\" y1=\"" + fmt(top_y0) + "\" x2=\"" +
         fmt(sx(boundary)) + "\" y2=\"" + fmt(top_y1) +
         "\" stroke=\"#999999\" stroke-dasharray=\"2,3\"/>\n";

  // Axes and a few y ticks.
  svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(top_y1) + "\" x2=\"" + fmt(x1) +
         "\" y2=\"" + fmt(top_y1) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(top_y0) + "\" x2=\"" + fmt(x0) +
         "\" y2=\"" + fmt(top_y1) + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    svg += "<text x=\"" + fmt(x0 - 8) + "\" y=\"" + fmt(sy(v) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
           fmt(v) + "</text>\n";
  }
  for (const int p : fig.periods)
    svg += "<text x=\"" + fmt(sx(p)) + "\" y=\"" + fmt(top_y1 + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           std::to_string(p) + "</text>\n";

  polyline(fig.treated, "#1f6fb4");
  polyline(fig.synthetic, "#d0563a");

  // Counterfactual segment.
  svg += "<line x1=\"" + fmt(sx(fig.cf_x0)) + "\" y1=\"" + fmt(sy(fig.cf_y0)) +
         "\" x2=\"" + fmt(sx(fig.cf_x1)) + "\" y2=\"" + fmt(sy(fig.cf_y1)) +
         "\" stroke=\"#444444\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";

  // Confidence whiskers, widest level drawn first.
  for (const auto& w : fig.whiskers) {
    const double wx = sx(w.x) + 10.0;
    svg += "<line x1=\"" + fmt(wx) + "\" y1=\"" + fmt(sy(w.outcome_lower)) + "\" x2=\"" +
           fmt(wx) + "\" y2=\"" + fmt(sy(w.outcome_upper)) +
           "\" stroke=\"#888888\" stroke-width=\"2\"/>\n";
    for (const double v : {w.outcome_lower, w.outcome_upper})
      svg += "<line x1=\"" + fmt(wx - 4) + "\" y1=\"" + fmt(sy(v)) + "\" x2=\"" +
             fmt(wx + 4) + "\" y2=\"" + fmt(sy(v)) +
             "\" stroke=\"#888888\" stroke-width=\"2\"/>\n";
  }

  svg += "<text x=\"" + fmt(x0) + "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"12\">treated (blue) vs synthetic (red); dashed = counterfactual, "
         "grey = confidence range</text>\n";

  // Bottom panel: time-weight bars over pre periods.
  const double wmax = *std::max_element(fig.time_weights.begin(), fig.time_weights.end());
  const Scale sw{0.0, wmax > 0.0 ? wmax : 1.0, bot_y1, bot_y0};
  svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(bot_y1) + "\" x2=\"" + fmt(x1) +
         "\" y2=\"" + fmt(bot_y1) + "\" stroke=\"black\"/>\n";
  const double slot = (x1 - x0) / static_cast<double>(fig.periods.size());
  const double bar_w = std::min(40.0, 0.6 * slot);
  for (std::size_t i = 0; i < fig.pre_periods.size(); ++i) {
    const double cx = sx(fig.pre_periods[i]);
    const double top = sw(fig.time_weights[i]);
    svg += "<rect x=\"" + fmt(cx - bar_w / 2) + "\" y=\"" + fmt(top) + "\" width=\"" +
           fmt(bar_w) + "\" height=\"" + fmt(bot_y1 - top) +
           "\" fill=\"#1f6fb4\" fill-opacity=\"0.8\"/>\n";
    svg += "<text x=\"" + fmt(cx) + "\" y=\"" + fmt(top - 4) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
           fmt(fig.time_weights[i]) + "</text>\n";
  }
  svg += "<text x=\"" + fmt(x0) + "\" y=\"" + fmt(bot_y0 - 14) +
         "\" font-family=\"sans-serif\" font-size=\"12\">pre-period time weights</text>\n";

  svg += "</svg>\n";
  return svg;
}

}  // namespace panelkit
