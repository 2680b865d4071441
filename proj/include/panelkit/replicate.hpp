#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "panelkit/json_io.hpp"
#include "panelkit/pipeline.hpp"

/*
 * replicate.hpp
 * -------------
 * One-shot preconfigured analyses of the July hotel overnight-stay panel for
 * the 2025 UEFA Women's EURO host cities versus non-host Swiss cities. The
 * city rosters, period windows, pre-period counts, and transforms are
 * compiled-in constants; data/replication_manifest.json documents the same
 * choices for reference. The input CSV needs unit, period, and outcome
 * columns (a treated column, if present, is ignored: the rosters decide).
 *
 * Variants:
 *   all_hosts   2022-2025 window, T0=3, pre-mean deviations, all 8 hosts
 *   main_hosts  same, treated restricted to Basel, Bern, Geneva, Zurich
 *   expanded    2017-2025 window, T0=8, incomplete units dropped and reported
 *   growth      2022-2025 window, year-over-year growth rates
 */

namespace panelkit {

enum class ReplicationVariant { all_hosts, main_hosts, expanded, growth };

std::string to_string(ReplicationVariant variant);
ReplicationVariant replication_variant_from_string(std::string_view name);

const std::vector<std::string>& replication_host_cities();       // 8 treated
const std::vector<std::string>& replication_main_host_cities();  // 4 of them
const std::vector<std::string>& replication_control_cities();    // 17 controls

struct ReplicationSpec {
  ReplicationVariant variant;
  int first_period;
  int last_period;
  int t0;
  TransformKind transform;
  bool drop_unbalanced;
  bool main_hosts_only;
};

const ReplicationSpec& replication_spec(ReplicationVariant variant);

struct ReplicationOutput {
  ReplicationVariant which;
  AnalysisOutput analysis;
  std::vector<std::string> dropped_units;  // incomplete within the window
  std::vector<std::string> ignored_units;  // present in the file, not in the rosters
};

ReplicationOutput run_replication(const std::vector<PanelRecord>& records,
                                  ReplicationVariant variant, std::uint64_t seed,
                                  int replications, const SolverSettings& solver = {});

// Estimate bundle plus which/dropped/ignored and the five figure series.
ordered_json replication_to_json(const ReplicationOutput& output);

}  // namespace panelkit
