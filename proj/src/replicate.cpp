#include "panelkit/replicate.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "panelkit/plot.hpp"

namespace panelkit {

std::string to_string(ReplicationVariant variant) {
  switch (variant) {
    case ReplicationVariant::all_hosts: return "all_hosts";
    case ReplicationVariant::main_hosts: return "main_hosts";
    case ReplicationVariant::expanded: return "expanded";
    case ReplicationVariant::growth: return "growth";
  }
  return "all_hosts";
}

ReplicationVariant replication_variant_from_string(std::string_view name) {
  if (name == "all_hosts") return ReplicationVariant::all_hosts;
  if (name == "main_hosts") return ReplicationVariant::main_hosts;
  if (name == "expanded") return ReplicationVariant::expanded;
  if (name == "growth") return ReplicationVariant::growth;
  throw ConfigError("unknown replication variant \"" + std::string(name) +
                    "\" (expected all_hosts, main_hosts, expanded, or growth)");
}

const std::vector<std::string>& replication_host_cities() {
  static const std::vector<std::string> cities = {
      "Zurich", "Basel", "Bern", "Geneva", "Lucerne", "St. Gallen", "Thun", "Sion"};
  return cities;
}

const std::vector<std::string>& replication_main_host_cities() {
  static const std::vector<std::string> cities = {"Basel", "Bern", "Geneva", "Zurich"};
  return cities;
}

const std::vector<std::string>& replication_control_cities() {
  static const std::vector<std::string> cities = {
      "Lausanne", "Winterthur", "Neuchâtel",  "Chur",   "Biel/Bienne", "Solothurn",
      "Vevey",    "Schaffhausen", "Baden",    "Bellinzona", "Nyon",    "Meyrin",
      "Vernier",  "Rümlang",    "Wallisellen", "Bussigny", "Lugano"};
  return cities;
}

const ReplicationSpec& replication_spec(ReplicationVariant variant) {
  static const ReplicationSpec all_hosts{ReplicationVariant::all_hosts, 2022, 2025, 3,
                                         TransformKind::demean_pre, false, false};
  static const ReplicationSpec main_hosts{ReplicationVariant::main_hosts, 2022, 2025, 3,
                                          TransformKind::demean_pre, false, true};
  static const ReplicationSpec expanded{ReplicationVariant::expanded, 2017, 2025, 8,
                                        TransformKind::demean_pre, true, false};
  static const ReplicationSpec growth{ReplicationVariant::growth, 2022, 2025, 3,
                                      TransformKind::growth, false, false};
  switch (variant) {
    case ReplicationVariant::all_hosts: return all_hosts;
    case ReplicationVariant::main_hosts: return main_hosts;
    case ReplicationVariant::expanded: return expanded;
    case ReplicationVariant::growth: return growth;
  }
  return all_hosts;
}

ReplicationOutput run_replication(const std::vector<PanelRecord>& records,
                                  ReplicationVariant variant, std::uint64_t seed,
                                  int replications, const SolverSettings& solver) {
  const ReplicationSpec& spec = replication_spec(variant);

  std::unordered_set<std::string> roster(replication_host_cities().begin(),
                                         replication_host_cities().end());
  roster.insert(replication_control_cities().begin(), replication_control_cities().end());

  // Window and roster filter; everything else in the file is reported, not used.
  std::vector<PanelRecord> kept;
  std::set<std::string> ignored;
  std::unordered_set<std::string> seen_units;
  std::set<int> seen_periods;
  for (const auto& rec : records) {
    if (!roster.count(rec.unit)) {
      ignored.insert(rec.unit);
      continue;
    }
    if (rec.period < spec.first_period || rec.period > spec.last_period) continue;
    seen_units.insert(rec.unit);
    seen_periods.insert(rec.period);
    kept.push_back(rec);
    kept.back().treated.reset();  // roster decides treatment
  }

  std::string missing_periods;
  for (int year = spec.first_period; year <= spec.last_period; ++year)
    if (!seen_periods.count(year)) missing_periods += (missing_periods.empty() ? "" : ", ") +
                                                      std::to_string(year);
  if (!missing_periods.empty())
    throw ConfigError("input panel is missing periods: " + missing_periods);

  std::string missing_units;
  for (const auto& lists : {&replication_host_cities(), &replication_control_cities()})
    for (const auto& city : *lists)
      if (!seen_units.count(city))
        missing_units += (missing_units.empty() ? "" : ", ") + city;
  if (!missing_units.empty())
    throw ConfigError("input panel is missing required units: " + missing_units);

  BuildOptions build;
  build.num_pre_periods = spec.t0;
  build.drop_unbalanced = spec.drop_unbalanced;
  build.treated_override = replication_host_cities();
  std::vector<std::string> dropped;
  const Panel panel = build_panel(kept, build, &dropped);

  // All hosts must survive an unbalanced-unit drop; controls may shrink.
  for (const auto& city : replication_host_cities())
    if (std::find(dropped.begin(), dropped.end(), city) != dropped.end())
      throw ConfigError("host city \"" + city + "\" has an incomplete series in " +
                        std::to_string(spec.first_period) + "-" +
                        std::to_string(spec.last_period));

  AnalysisConfig config;
  config.estimator = EstimatorKind::sdid;
  config.transform = spec.transform;
  config.t0 = spec.t0;
  if (spec.main_hosts_only) config.treated_subset = replication_main_host_cities();
  config.replications = replications;
  config.seed = seed;
  config.ci_levels = {0.90, 0.95};
  config.solver = solver;
  config.drop_unbalanced = spec.drop_unbalanced;

  ReplicationOutput out{variant, run_analysis(panel, config), dropped,
                        std::vector<std::string>(ignored.begin(), ignored.end())};
  return out;
}

ordered_json replication_to_json(const ReplicationOutput& output) {
  ordered_json doc = build_estimate_bundle(output.analysis, output.dropped_units);
  doc["which"] = to_string(output.which);
  doc["ignored_units"] = output.ignored_units;
  doc["figure"] = figure_to_json(figure_series(output.analysis))["series"];
  return doc;
}

}  // namespace panelkit
