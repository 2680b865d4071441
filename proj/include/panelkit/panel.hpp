#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "panelkit/errors.hpp"

/*
 * panel.hpp
 * ---------
 * Balanced unit-by-period outcome panels with block treatment assignment:
 * every treated unit is treated in exactly the periods after the first T0.
 * Panels are immutable after construction; transforms return new values.
 */

namespace panelkit {

enum class TransformKind { none, demean_pre, growth };

std::string to_string(TransformKind kind);
TransformKind transform_from_string(std::string_view name);

class Panel {
public:
  // Validates all invariants: unique units, strictly increasing periods,
  // finite outcomes, nonempty treated strict subset, 1 <= t0 < n_periods.
  Panel(std::vector<std::string> units, std::vector<int> periods,
        Eigen::MatrixXd outcomes, const std::vector<std::string>& treated_units,
        int num_pre_periods);

  const std::vector<std::string>& units() const { return units_; }
  const std::vector<int>& periods() const { return periods_; }
  // Rows follow units(), columns follow periods().
  const Eigen::MatrixXd& outcomes() const { return outcomes_; }
  const std::vector<std::string>& treated_units() const { return treated_units_; }
  int num_pre_periods() const { return t0_; }

  Eigen::Index n_units() const { return outcomes_.rows(); }
  Eigen::Index n_periods() const { return outcomes_.cols(); }
  Eigen::Index n_treated() const { return static_cast<Eigen::Index>(treated_units_.size()); }
  Eigen::Index n_controls() const { return n_units() - n_treated(); }
  Eigen::Index n_post_periods() const { return n_periods() - t0_; }

  bool treated_at(Eigen::Index unit_row) const { return treated_mask_[static_cast<std::size_t>(unit_row)] != 0; }
  std::vector<Eigen::Index> treated_indices() const;
  std::vector<Eigen::Index> control_indices() const;
  std::vector<std::string> control_units() const;

  // Same data under a different pre-period count.
  Panel with_num_pre_periods(int t0) const;

private:
  std::vector<std::string> units_;
  std::vector<int> periods_;
  Eigen::MatrixXd outcomes_;
  std::vector<std::string> treated_units_;  // in unit order
  std::vector<char> treated_mask_;
  int t0_;
};

// ---------------------------------------------------------------------------
// CSV ingestion. Long format, UTF-8, comma separated, header row required.
// ---------------------------------------------------------------------------

struct CsvSchema {
  std::string unit = "unit";
  std::string period = "period";
  std::string outcome = "outcome";
  std::string treated = "treated";
};

struct PanelRecord {
  std::string unit;
  int period = 0;
  double outcome = 0.0;
  std::optional<bool> treated;
  std::size_t line = 0;  // 1-based line number in the source
};

// Parses rows without assembling a panel; replicate-style callers window the
// records first. When treated_required, a missing treated column is an error.
std::vector<PanelRecord> parse_panel_csv(std::istream& in, const CsvSchema& schema,
                                         bool treated_required = true);

struct BuildOptions {
  int num_pre_periods = 1;
  bool drop_unbalanced = false;
  // When set, overrides any treated flags carried by the records.
  std::optional<std::vector<std::string>> treated_override;
};

// Assembles records into a balanced Panel. Units keep first-appearance order,
// periods sort ascending. Missing cells raise BalanceError unless
// drop_unbalanced, in which case incomplete units are removed and reported
// through dropped_units.
Panel build_panel(const std::vector<PanelRecord>& records, const BuildOptions& options,
                  std::vector<std::string>* dropped_units = nullptr);

struct LoadOptions {
  CsvSchema schema;
  int num_pre_periods = 1;
  bool drop_unbalanced = false;
};

struct LoadReport {
  Panel panel;
  std::vector<std::string> dropped_units;
};

LoadReport load_panel(std::istream& in, const LoadOptions& options);
LoadReport load_panel_file(const std::string& path, const LoadOptions& options);

// ---------------------------------------------------------------------------
// Transforms.
// ---------------------------------------------------------------------------

// Deviation from each unit's pre-period mean: y[j,t] - mean(y[j,1..T0]).
// Idempotent and exactly difference-preserving within units.
Panel demean_pre(const Panel& panel);

// Period-over-period growth rates y[j,t]/y[j,t-1] - 1. Consumes the first
// period as the base and decrements T0; zero denominators raise
// DegenerateOutcomeError naming the offending (unit, period).
Panel growth_transform(const Panel& panel);

// Keeps only the listed treated units; dropped treated units leave the panel
// entirely. keep must be a nonempty subset of treated_units().
Panel restrict_treated(const Panel& panel, const std::vector<std::string>& keep);

// Slices the period axis to [first, last] and re-anchors T0.
Panel restrict_periods(const Panel& panel, int first, int last, int num_pre_periods);

// Mean outcome of treated units over pre periods, the baseline for relative
// effect sizes.
double treated_pre_mean(const Panel& panel);

}  // namespace panelkit
