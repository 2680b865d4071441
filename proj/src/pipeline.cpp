#include "panelkit/pipeline.hpp"

#include <algorithm>

namespace panelkit {

AnalysisOutput run_analysis(const Panel& loaded, const AnalysisConfig& config) {
  config.validate();

  Panel working = config.treated_subset ? restrict_treated(loaded, *config.treated_subset)
                                        : loaded;

  std::optional<double> baseline;
  Panel analysed = working;
  switch (config.transform) {
    case TransformKind::none:
      baseline = treated_pre_mean(working);
      break;
    case TransformKind::demean_pre:
      baseline = treated_pre_mean(working);  // baseline stays on the raw scale
      analysed = demean_pre(working);
      break;
    case TransformKind::growth:
      analysed = growth_transform(working);
      break;
  }

  AnalysisOutput out{analysed, {}, {}, {}, baseline, std::nullopt};
  out.result = estimate(analysed, config.estimator, config);
  out.placebo = placebo_inference(analysed, config.estimator, config);

  std::vector<double> levels = config.ci_levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (const double level : levels)
    out.intervals.push_back(confidence_interval(out.result.att, out.placebo, level));

  if (baseline && *baseline > 0.0) out.relative = relative_effect(out.result, *baseline);
  return out;
}

}  // namespace panelkit
