#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "panelkit/json_io.hpp"
#include "panelkit/panel.hpp"
#include "panelkit/rng.hpp"

using namespace panelkit;

namespace {

Panel load_text(const std::string& csv, int t0 = 1, bool drop_unbalanced = false) {
  std::istringstream in(csv);
  LoadOptions opts;
  opts.num_pre_periods = t0;
  opts.drop_unbalanced = drop_unbalanced;
  return load_panel(in, opts).panel;
}

Panel make_panel(std::vector<std::string> units, std::vector<int> periods,
                 std::vector<std::vector<double>> rows, std::vector<std::string> treated,
                 int t0) {
  Eigen::MatrixXd y(units.size(), periods.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return Panel(std::move(units), std::move(periods), std::move(y), treated, t0);
}

std::string small_csv(bool omit_lucerne_2023 = false) {
  std::string csv = "unit,period,outcome,treated\n";
  const std::vector<std::string> units = {"Zug", "Lucerne", "Aarau", "Olten", "Wil"};
  for (int year = 2021; year <= 2025; ++year) {
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (omit_lucerne_2023 && units[i] == "Lucerne" && year == 2023) continue;
      csv += units[i] + "," + std::to_string(year) + "," +
             std::to_string(100.0 * (i + 1) + year - 2021) + "," +
             (units[i] == "Zug" ? "1" : "0") + "\n";
    }
  }
  return csv;
}

}  // namespace

TEST_CASE("a minimal well-formed file loads into a 5x5 panel") {
  const Panel p = load_text(small_csv(), 2);
  CHECK(p.n_units() == 5);
  CHECK(p.n_periods() == 5);
  CHECK(p.treated_units() == std::vector<std::string>{"Zug"});
  CHECK(p.num_pre_periods() == 2);
  // Units keep first-appearance order, periods sort ascending.
  CHECK(p.units().front() == "Zug");
  CHECK(p.periods() == std::vector<int>{2021, 2022, 2023, 2024, 2025});
}

TEST_CASE("row order does not matter and periods sort ascending") {
  const std::string csv =
      "unit,period,outcome,treated\n"
      "b,2024,4,0\n"
      "a,2023,1,1\n"
      "b,2023,3,0\n"
      "a,2024,2,1\n";
  const Panel p = load_text(csv);
  CHECK(p.units() == std::vector<std::string>{"b", "a"});
  CHECK(p.periods() == std::vector<int>{2023, 2024});
  CHECK(p.outcomes()(1, 0) == 1.0);
  CHECK(p.outcomes()(0, 1) == 4.0);
}

TEST_CASE("missing cell raises BalanceError naming the unit and period") {
  try {
    (void)load_text(small_csv(/*omit_lucerne_2023=*/true));
    FAIL("expected BalanceError");
  } catch (const BalanceError& e) {
    CHECK(e.unit == "Lucerne");
    CHECK(e.period == 2023);
  }
}

TEST_CASE("loader error paths") {
  CHECK_THROWS_AS((void)load_text(""), ParseError);                       // empty file
  CHECK_THROWS_AS((void)load_text("unit,period,outcome,treated\n"), ParseError);
  CHECK_THROWS_AS((void)load_text("unit,period,value\nA,1,2\n"), ParseError);

  const std::string dup =
      "unit,period,outcome,treated\nA,1,2,1\nA,1,3,1\nB,1,4,0\n";
  try {
    (void)load_text(dup);
    FAIL("expected DuplicateError");
  } catch (const DuplicateError& e) {
    CHECK(e.unit == "A");
    CHECK(e.period == 1);
  }

  const std::string flip =
      "unit,period,outcome,treated\nA,1,2,1\nA,2,3,0\nB,1,4,0\nB,2,5,0\n";
  CHECK_THROWS_AS((void)load_text(flip), AssignmentError);

  const std::string nonfinite =
      "unit,period,outcome,treated\nA,1,nan,1\nB,1,4,0\n";
  CHECK_THROWS_AS((void)load_text(nonfinite), ParseError);

  const std::string bad_flag = "unit,period,outcome,treated\nA,1,2,yes\n";
  CHECK_THROWS_AS((void)load_text(bad_flag), ParseError);
}

TEST_CASE("drop-unbalanced removes and reports incomplete units") {
  const std::string csv =
      "unit,period,outcome,treated\n"
      "A,1,1,1\nA,2,2,1\n"
      "B,1,3,0\nB,2,4,0\n"
      "C,2,5,0\n";  // C misses period 1
  std::istringstream in(csv);
  LoadOptions opts;
  opts.drop_unbalanced = true;
  const LoadReport report = load_panel(in, opts);
  CHECK(report.panel.n_units() == 2);
  CHECK(report.dropped_units == std::vector<std::string>{"C"});
}

TEST_CASE("quoted fields and CRLF are handled") {
  const std::string csv =
      "unit,period,outcome,treated\r\n"
      "\"St. Gallen\",2024,10,1\r\n"
      "\"Biel, BE\",2024,20,0\r\n"
      "\"St. Gallen\",2025,12,1\r\n"
      "\"Biel, BE\",2025,21,0\r\n";
  const Panel p = load_text(csv);
  CHECK(p.units() == std::vector<std::string>{"St. Gallen", "Biel, BE"});
}

TEST_CASE("fixture: host-city panel has the documented shape") {
  LoadOptions opts;
  opts.num_pre_periods = 3;
  const LoadReport report =
      load_panel_file(std::string(PANELKIT_DATA_DIR) + "/host_cities_2022_2025.csv", opts);
  const Panel& p = report.panel;
  CHECK(p.n_units() == 25);
  CHECK(p.n_periods() == 4);
  CHECK(p.n_treated() == 8);
  CHECK(p.n_controls() == 17);
  const std::set<std::string> treated(p.treated_units().begin(), p.treated_units().end());
  const std::set<std::string> expected = {"Zurich", "Basel",      "Bern", "Geneva",
                                          "Lucerne", "St. Gallen", "Thun", "Sion"};
  CHECK(treated == expected);
}

TEST_CASE("demean_pre examples") {
  const Panel constant = make_panel({"a", "b"}, {1, 2, 3, 4},
                                    {{7, 7, 7, 7}, {1, 2, 3, 4}}, {"a"}, 3);
  const Panel d = demean_pre(constant);
  for (int j = 0; j < 4; ++j) CHECK(d.outcomes()(0, j) == doctest::Approx(0.0));

  const Panel p = make_panel({"a", "b"}, {1, 2, 3, 4},
                             {{10, 20, 30, 100}, {5, 5, 5, 5}}, {"a"}, 3);
  const Panel dp = demean_pre(p);
  CHECK(dp.outcomes()(0, 0) == doctest::Approx(-10.0));
  CHECK(dp.outcomes()(0, 1) == doctest::Approx(0.0));
  CHECK(dp.outcomes()(0, 2) == doctest::Approx(10.0));
  CHECK(dp.outcomes()(0, 3) == doctest::Approx(80.0));
  CHECK(dp.num_pre_periods() == 3);
  CHECK(dp.treated_units() == p.treated_units());
}

TEST_CASE("growth_transform examples") {
  const Panel p = make_panel({"a", "b"}, {1, 2, 3}, {{100, 110, 99}, {5, 5, 5}}, {"a"}, 2);
  const Panel g = growth_transform(p);
  CHECK(g.n_periods() == 2);
  CHECK(g.periods() == std::vector<int>{2, 3});
  CHECK(g.num_pre_periods() == 1);
  CHECK(g.outcomes()(0, 0) == doctest::Approx(0.10));
  CHECK(g.outcomes()(0, 1) == doctest::Approx(-0.10));
  CHECK(g.outcomes()(1, 0) == doctest::Approx(0.0));
  CHECK(g.outcomes()(1, 1) == doctest::Approx(0.0));

  const Panel zero = make_panel({"a", "b"}, {1, 2, 3}, {{100, 0, 50}, {5, 5, 5}}, {"a"}, 2);
  try {
    (void)growth_transform(zero);
    FAIL("expected DegenerateOutcomeError");
  } catch (const DegenerateOutcomeError& e) {
    CHECK(std::string(e.what()).find("period 2") != std::string::npos);
    CHECK(std::string(e.what()).find("\"a\"") != std::string::npos);
  }

  const Panel t0_one = make_panel({"a", "b"}, {1, 2}, {{1, 2}, {3, 4}}, {"a"}, 1);
  CHECK_THROWS_AS((void)growth_transform(t0_one), ConfigError);
}

TEST_CASE("restrict_treated") {
  const Panel p = make_panel({"t1", "t2", "c1", "c2"}, {1, 2},
                             {{1, 2}, {3, 4}, {5, 6}, {7, 8}}, {"t1", "t2"}, 1);
  const Panel r = restrict_treated(p, {"t2"});
  CHECK(r.n_units() == 3);  // t1 left entirely
  CHECK(r.treated_units() == std::vector<std::string>{"t2"});
  CHECK(r.control_units() == std::vector<std::string>{"c1", "c2"});

  const Panel same = restrict_treated(p, {"t1", "t2"});
  CHECK(same.units() == p.units());
  CHECK(same.outcomes() == p.outcomes());

  CHECK_THROWS_AS((void)restrict_treated(p, {"c1"}), ConfigError);
  CHECK_THROWS_AS((void)restrict_treated(p, {}), ConfigError);
}

TEST_CASE("restrict_periods re-anchors the window") {
  const Panel p = make_panel({"a", "b"}, {2017, 2018, 2022, 2023},
                             {{1, 2, 3, 4}, {5, 6, 7, 8}}, {"a"}, 3);
  const Panel r = restrict_periods(p, 2022, 2023, 1);
  CHECK(r.periods() == std::vector<int>{2022, 2023});
  CHECK(r.outcomes()(0, 0) == 3.0);
  CHECK(r.num_pre_periods() == 1);
  CHECK_THROWS_AS((void)restrict_periods(p, 1990, 1999, 1), ConfigError);
}

TEST_CASE("panel invariant violations are rejected") {
  CHECK_THROWS_AS(make_panel({"a", "a"}, {1, 2}, {{1, 2}, {3, 4}}, {"a"}, 1), ConfigError);
  CHECK_THROWS_AS(make_panel({"a", "b"}, {2, 1}, {{1, 2}, {3, 4}}, {"a"}, 1), ConfigError);
  CHECK_THROWS_AS(make_panel({"a", "b"}, {1, 2}, {{1, 2}, {3, 4}}, {}, 1), ConfigError);
  CHECK_THROWS_AS(make_panel({"a", "b"}, {1, 2}, {{1, 2}, {3, 4}}, {"a", "b"}, 1),
                  ConfigError);
  CHECK_THROWS_AS(make_panel({"a", "b"}, {1, 2}, {{1, 2}, {3, 4}}, {"a"}, 2), ConfigError);
  CHECK_THROWS_AS(make_panel({"a", "b"}, {1, 2}, {{1, 2}, {3, 4}}, {"a"}, 0), ConfigError);
  CHECK_THROWS_AS(make_panel({"a", "b"}, {1, 2}, {{1, INFINITY}, {3, 4}}, {"a"}, 1),
                  ConfigError);
}

// ---------------------------------------------------------------------------
// Property tests over random panels.
// ---------------------------------------------------------------------------

namespace {

Panel random_panel(rng::SplitMix64& gen, bool positive_outcomes) {
  const int n_units = 2 + static_cast<int>(gen.below(4));
  const int n_periods = 3 + static_cast<int>(gen.below(8));
  const int t0 = 2 + static_cast<int>(gen.below(static_cast<std::uint64_t>(n_periods - 2)));
  std::vector<std::string> units;
  std::vector<std::string> treated;
  for (int i = 0; i < n_units; ++i) units.push_back("u" + std::to_string(i));
  const int n_treated = 1 + static_cast<int>(gen.below(static_cast<std::uint64_t>(n_units - 1)));
  for (int i = 0; i < n_treated; ++i) treated.push_back(units[static_cast<std::size_t>(i)]);
  std::vector<int> periods;
  for (int t = 0; t < n_periods; ++t) periods.push_back(2000 + t);
  Eigen::MatrixXd y(n_units, n_periods);
  for (int i = 0; i < n_units; ++i)
    for (int t = 0; t < n_periods; ++t)
      y(i, t) = positive_outcomes ? 0.5 + 9.5 * gen.uniform01() : 10.0 * gen.gaussian();
  return Panel(std::move(units), std::move(periods), std::move(y), treated, t0);
}

}  // namespace

TEST_CASE("demean_pre is idempotent and preserves within-unit differences") {
  rng::SplitMix64 gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Panel p = random_panel(gen, false);
    const Panel d = demean_pre(p);

    // Pre-period means vanish.
    const Eigen::VectorXd pre_means =
        d.outcomes().leftCols(d.num_pre_periods()).rowwise().mean();
    for (Eigen::Index i = 0; i < d.n_units(); ++i)
      CHECK(std::abs(pre_means[i]) <= 1e-9 * (1.0 + p.outcomes().row(i).cwiseAbs().maxCoeff()));

    const Panel dd = demean_pre(d);
    CHECK((dd.outcomes() - d.outcomes()).cwiseAbs().maxCoeff() <= 1e-9);

    // Differences survive exactly: y[t] - y[s] is untouched by the shift.
    for (Eigen::Index i = 0; i < p.n_units(); ++i)
      for (Eigen::Index t = 1; t < p.n_periods(); ++t) {
        const double before = p.outcomes()(i, t) - p.outcomes()(i, t - 1);
        const double after = d.outcomes()(i, t) - d.outcomes()(i, t - 1);
        CHECK(after == doctest::Approx(before).epsilon(1e-12));
      }
  }
}

TEST_CASE("growth rates ignore positive rescaling of a unit's series") {
  rng::SplitMix64 gen(37);
  for (int trial = 0; trial < 200; ++trial) {
    const Panel p = random_panel(gen, true);
    const double scale = 0.1 + 10.0 * gen.uniform01();
    Eigen::MatrixXd scaled = p.outcomes();
    scaled.row(0) *= scale;
    const Panel q(p.units(), p.periods(), scaled, p.treated_units(), p.num_pre_periods());
    const Panel ga = growth_transform(p);
    const Panel gb = growth_transform(q);
    CHECK((ga.outcomes() - gb.outcomes()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("restrict_treated commutes with demean_pre") {
  rng::SplitMix64 gen(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Panel p = random_panel(gen, false);
    if (p.n_treated() < 2) continue;
    const std::vector<std::string> keep = {p.treated_units().front()};
    const Panel a = demean_pre(restrict_treated(p, keep));
    const Panel b = restrict_treated(demean_pre(p), keep);
    CHECK(a.units() == b.units());
    CHECK((a.outcomes() - b.outcomes()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("panel round-trips through JSON field-wise") {
  rng::SplitMix64 gen(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Panel p = random_panel(gen, false);
    const Panel q = panel_from_json(nlohmann::json::parse(panel_to_json(p).dump()));
    CHECK(q.units() == p.units());
    CHECK(q.periods() == p.periods());
    CHECK(q.treated_units() == p.treated_units());
    CHECK(q.num_pre_periods() == p.num_pre_periods());
    CHECK(q.outcomes() == p.outcomes());  // shortest round-trip doubles are exact
  }
}

TEST_CASE("serialized CSV reload matches the original panel") {
  const Panel p = load_text(small_csv(), 2);
  // Rebuild the CSV from the panel and reload it.
  std::string csv = "unit,period,outcome,treated\n";
  for (Eigen::Index i = 0; i < p.n_units(); ++i)
    for (Eigen::Index j = 0; j < p.n_periods(); ++j) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", p.outcomes()(i, j));
      csv += p.units()[static_cast<std::size_t>(i)] + "," +
             std::to_string(p.periods()[static_cast<std::size_t>(j)]) + "," + buf + "," +
             (p.treated_at(i) ? "1" : "0") + "\n";
    }
  const Panel q = load_text(csv, 2);
  CHECK(q.units() == p.units());
  CHECK(q.outcomes() == p.outcomes());
  CHECK(q.treated_units() == p.treated_units());
}
