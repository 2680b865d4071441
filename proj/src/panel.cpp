#include "panelkit/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace panelkit {

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::none: return "none";
    case TransformKind::demean_pre: return "demean_pre";
    case TransformKind::growth: return "growth";
  }
  return "none";
}

TransformKind transform_from_string(std::string_view name) {
  if (name == "none") return TransformKind::none;
  if (name == "demean_pre") return TransformKind::demean_pre;
  if (name == "growth") return TransformKind::growth;
  throw ConfigError("unknown transform \"" + std::string(name) +
                    "\" (expected none, demean_pre, or growth)");
}

Panel::Panel(std::vector<std::string> units, std::vector<int> periods,
             Eigen::MatrixXd outcomes, const std::vector<std::string>& treated_units,
             int num_pre_periods)
    : units_(std::move(units)), periods_(std::move(periods)), outcomes_(std::move(outcomes)), t0_(num_pre_periods) {
  if (units_.empty()) throw ConfigError("panel needs at least one unit");
  if (outcomes_.rows() != static_cast<Eigen::Index>(units_.size()) ||
      outcomes_.cols() != static_cast<Eigen::Index>(periods_.size()))
    throw DimensionError("outcome matrix is " + std::to_string(outcomes_.rows()) + "x" +
                         std::to_string(outcomes_.cols()) + " but panel has " +
                         std::to_string(units_.size()) + " units and " +
                         std::to_string(periods_.size()) + " periods");
  if (!outcomes_.allFinite()) throw ConfigError("panel outcomes must all be finite");

  std::unordered_set<std::string> seen;
  for (const auto& u : units_)
    if (!seen.insert(u).second) throw ConfigError("duplicate unit id \"" + u + "\"");
  for (std::size_t i = 1; i < periods_.size(); ++i)
    if (periods_[i] <= periods_[i - 1])
      throw ConfigError("period labels must be strictly increasing");

  std::unordered_set<std::string> treated_set;
  for (const auto& u : treated_units) {
    if (!seen.count(u)) throw ConfigError("treated unit \"" + u + "\" is not in the panel");
    if (!treated_set.insert(u).second)
      throw ConfigError("treated unit \"" + u + "\" listed twice");
  }
  if (treated_set.empty()) throw ConfigError("panel needs at least one treated unit");
  if (treated_set.size() == units_.size())
    throw ConfigError("panel needs at least one control unit");

  treated_mask_.resize(units_.size(), 0);
  for (std::size_t i = 0; i < units_.size(); ++i)
    if (treated_set.count(units_[i])) {
      treated_mask_[i] = 1;
      treated_units_.push_back(units_[i]);
    }

  if (t0_ < 1 || t0_ >= static_cast<int>(periods_.size()))
    throw ConfigError("pre-period count T0=" + std::to_string(t0_) +
                      " must satisfy 1 <= T0 < " + std::to_string(periods_.size()));
}

std::vector<Eigen::Index> Panel::treated_indices() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < n_units(); ++i)
    if (treated_at(i)) out.push_back(i);
  return out;
}

std::vector<Eigen::Index> Panel::control_indices() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < n_units(); ++i)
    if (!treated_at(i)) out.push_back(i);
  return out;
}

std::vector<std::string> Panel::control_units() const {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n_units(); ++i)
    if (!treated_at(i)) out.push_back(units_[static_cast<std::size_t>(i)]);
  return out;
}

Panel Panel::with_num_pre_periods(int t0) const {
  return Panel(units_, periods_, outcomes_, treated_units_, t0);
}

// ---------------------------------------------------------------------------
// CSV parsing
// ---------------------------------------------------------------------------

namespace {

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted)
    throw ParseError("line " + std::to_string(line_no) + ": unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

int parse_period(const std::string& text, std::size_t line_no) {
  int value = 0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("line " + std::to_string(line_no) + ": period \"" + text +
                     "\" is not an integer");
  return value;
}

double parse_outcome(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw ParseError("line " + std::to_string(line_no) + ": outcome \"" + text +
                     "\" is not a finite number");
  return value;
}

bool parse_treated_flag(const std::string& text, std::size_t line_no) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw ParseError("line " + std::to_string(line_no) + ": treated flag \"" + text +
                   "\" must be 0 or 1");
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

std::vector<PanelRecord> parse_panel_csv(std::istream& in, const CsvSchema& schema,
                                         bool treated_required) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: no header row");
  line = strip_cr(line);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_csv_line(line, 1);
  auto find_column = [&](const std::string& name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };
  const auto unit_col = find_column(schema.unit);
  const auto period_col = find_column(schema.period);
  const auto outcome_col = find_column(schema.outcome);
  const auto treated_col = find_column(schema.treated);
  if (unit_col < 0) throw ParseError("missing column \"" + schema.unit + "\"");
  if (period_col < 0) throw ParseError("missing column \"" + schema.period + "\"");
  if (outcome_col < 0) throw ParseError("missing column \"" + schema.outcome + "\"");
  if (treated_required && treated_col < 0)
    throw ParseError("missing column \"" + schema.treated + "\"");
  const std::size_t needed = static_cast<std::size_t>(
      std::max({unit_col, period_col, outcome_col, treated_col}) + 1);

  std::vector<PanelRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() < needed)
      throw ParseError("line " + std::to_string(line_no) + ": expected at least " +
                       std::to_string(needed) + " fields, found " +
                       std::to_string(fields.size()));
    PanelRecord rec;
    rec.unit = fields[static_cast<std::size_t>(unit_col)];
    rec.period = parse_period(fields[static_cast<std::size_t>(period_col)], line_no);
    rec.outcome = parse_outcome(fields[static_cast<std::size_t>(outcome_col)], line_no);
    if (treated_col >= 0)
      rec.treated = parse_treated_flag(fields[static_cast<std::size_t>(treated_col)], line_no);
    rec.line = line_no;
    if (rec.unit.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty unit id");
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw ParseError("no data rows after the header");
  return records;
}

Panel build_panel(const std::vector<PanelRecord>& records, const BuildOptions& options,
                  std::vector<std::string>* dropped_units) {
  if (records.empty()) throw ParseError("cannot build a panel from zero records");

  std::vector<std::string> units;  // first-appearance order
  std::unordered_map<std::string, std::size_t> unit_index;
  std::set<int> period_set;
  for (const auto& rec : records) {
    if (unit_index.emplace(rec.unit, units.size()).second) units.push_back(rec.unit);
    period_set.insert(rec.period);
  }
  const std::vector<int> periods(period_set.begin(), period_set.end());
  std::unordered_map<int, std::size_t> period_index;
  for (std::size_t j = 0; j < periods.size(); ++j) period_index[periods[j]] = j;

  // Cell grid plus per-unit treated flags.
  Eigen::MatrixXd cells(units.size(), periods.size());
  Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic> present(units.size(), periods.size());
  present.setZero();
  std::vector<std::optional<bool>> flags(units.size());
  for (const auto& rec : records) {
    const std::size_t i = unit_index[rec.unit];
    const std::size_t j = period_index[rec.period];
    if (present(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
      throw DuplicateError(rec.unit, rec.period);
    present(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1;
    cells(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rec.outcome;
    if (rec.treated.has_value()) {
      if (flags[i].has_value() && *flags[i] != *rec.treated)
        throw AssignmentError("unit \"" + rec.unit +
                              "\" has an inconsistent treated flag (line " +
                              std::to_string(rec.line) + ")");
      flags[i] = rec.treated;
    }
  }

  // Balance check, in unit order then period order.
  std::vector<char> keep(units.size(), 1);
  std::vector<std::string> dropped;
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t j = 0; j < periods.size(); ++j) {
      if (present(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) continue;
      if (!options.drop_unbalanced) throw BalanceError(units[i], periods[j]);
      keep[i] = 0;
      dropped.push_back(units[i]);
      break;
    }
  }
  if (dropped_units) *dropped_units = dropped;

  std::vector<std::string> kept_units;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (keep[i]) kept_units.push_back(units[i]);
  if (kept_units.empty()) throw ConfigError("every unit was dropped as unbalanced");

  Eigen::MatrixXd outcomes(kept_units.size(), periods.size());
  std::vector<std::string> treated;
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!keep[i]) continue;
    outcomes.row(row++) = cells.row(static_cast<Eigen::Index>(i));
    if (!options.treated_override && flags[i].value_or(false)) treated.push_back(units[i]);
  }
  if (options.treated_override) {
    std::unordered_set<std::string> kept_set(kept_units.begin(), kept_units.end());
    for (const auto& u : *options.treated_override)
      if (kept_set.count(u)) treated.push_back(u);
  }

  return Panel(std::move(kept_units), periods, std::move(outcomes), treated,
               options.num_pre_periods);
}

LoadReport load_panel(std::istream& in, const LoadOptions& options) {
  const auto records = parse_panel_csv(in, options.schema, /*treated_required=*/true);
  BuildOptions build;
  build.num_pre_periods = options.num_pre_periods;
  build.drop_unbalanced = options.drop_unbalanced;
  std::vector<std::string> dropped;
  Panel panel = build_panel(records, build, &dropped);
  return LoadReport{std::move(panel), std::move(dropped)};
}

LoadReport load_panel_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open \"" + path + "\"");
  return load_panel(in, options);
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

Panel demean_pre(const Panel& panel) {
  const Eigen::Index t0 = panel.num_pre_periods();
  const Eigen::VectorXd pre_means = panel.outcomes().leftCols(t0).rowwise().mean();
  Eigen::MatrixXd out = panel.outcomes().colwise() - pre_means;
  return Panel(panel.units(), panel.periods(), std::move(out), panel.treated_units(),
               panel.num_pre_periods());
}

Panel growth_transform(const Panel& panel) {
  const Eigen::Index T = panel.n_periods();
  if (T < 2) throw ConfigError("growth transform needs at least 2 periods");
  if (panel.num_pre_periods() < 2)
    throw ConfigError("growth transform needs T0 >= 2 so one pre period survives");

  const Eigen::MatrixXd& y = panel.outcomes();
  Eigen::MatrixXd out(panel.n_units(), T - 1);
  for (Eigen::Index i = 0; i < panel.n_units(); ++i) {
    for (Eigen::Index t = 1; t < T; ++t) {
      const double denom = y(i, t - 1);
      if (denom == 0.0)
        throw DegenerateOutcomeError(
            "growth rate undefined: unit \"" + panel.units()[static_cast<std::size_t>(i)] +
            "\" has outcome 0 in period " +
            std::to_string(panel.periods()[static_cast<std::size_t>(t - 1)]));
      out(i, t - 1) = y(i, t) / denom - 1.0;
    }
  }
  const std::vector<int> periods(panel.periods().begin() + 1, panel.periods().end());
  return Panel(panel.units(), periods, std::move(out), panel.treated_units(),
               panel.num_pre_periods() - 1);
}

Panel restrict_treated(const Panel& panel, const std::vector<std::string>& keep) {
  if (keep.empty()) throw ConfigError("treated subset must not be empty");
  std::unordered_set<std::string> treated_set(panel.treated_units().begin(),
                                              panel.treated_units().end());
  std::unordered_set<std::string> keep_set;
  for (const auto& u : keep) {
    if (!treated_set.count(u))
      throw ConfigError("unit \"" + u + "\" is not a treated unit of the panel");
    keep_set.insert(u);
  }

  std::vector<std::string> units;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < panel.n_units(); ++i) {
    const std::string& u = panel.units()[static_cast<std::size_t>(i)];
    if (panel.treated_at(i) && !keep_set.count(u)) continue;  // dropped entirely
    units.push_back(u);
    rows.push_back(i);
  }
  const Eigen::MatrixXd outcomes = panel.outcomes()(rows, Eigen::all);
  return Panel(std::move(units), panel.periods(), outcomes,
               std::vector<std::string>(keep_set.begin(), keep_set.end()),
               panel.num_pre_periods());
}

Panel restrict_periods(const Panel& panel, int first, int last, int num_pre_periods) {
  if (first > last) throw ConfigError("period window is empty");
  std::vector<int> periods;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < panel.n_periods(); ++j) {
    const int p = panel.periods()[static_cast<std::size_t>(j)];
    if (p < first || p > last) continue;
    periods.push_back(p);
    cols.push_back(j);
  }
  if (periods.empty())
    throw ConfigError("no panel periods inside [" + std::to_string(first) + ", " +
                      std::to_string(last) + "]");
  const Eigen::MatrixXd outcomes = panel.outcomes()(Eigen::all, cols);
  return Panel(panel.units(), std::move(periods), outcomes, panel.treated_units(),
               num_pre_periods);
}

double treated_pre_mean(const Panel& panel) {
  const auto rows = panel.treated_indices();
  return panel.outcomes()(rows, Eigen::all).leftCols(panel.num_pre_periods()).mean();
}

}  // namespace panelkit
