#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uoqs/calibration.hpp"
#include "uoqs/experiments.hpp"

using namespace uoqs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Scenario seeded_scenario(ModelKind kind, double lambda = 1.0, double mu = 1.0) {
  Scenario sc;
  sc.params.kind = kind;
  sc.params.lambda = lambda;
  sc.params.mu = mu;
  sc.o0 = 1.0;
  sc.s0_frac = 0.07;
  return sc;
}

Trajectory metric_run(const Scenario& sc) {
  return simulate(sc.initial_state(), sc.params, sc.horizon, StopRule{sc.metric_stop});
}

// minimal XML well-formedness check: declaration, matched tag stack, no
// external references
bool well_formed_xml(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  if (text.rfind("<?xml", 0) != 0) return false;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const std::size_t end = text.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag.front() == '?' || tag.front() == '!') continue;
    const bool closing = tag.front() == '/';
    const bool self_closing = tag.back() == '/';
    if (closing) tag.erase(0, 1);
    if (self_closing) tag.pop_back();
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
    if (name.empty()) return false;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self_closing) {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("retweet metric") {
  SECTION("alpha = 1 annihilates inflow; offender activity remains the seed decay") {
    Scenario sc = seeded_scenario(ModelKind::Basic);
    sc.params.alpha = 1.0;
    Trajectory traj = metric_run(sc);
    CHECK(new_offenders_per_seed(traj) == 0.0);
    CHECK(retweets_per_tweet(traj) < 1.0);  // pure decay of the single seed
  }
  SECTION("reference scenario, frozen against the straight-loop oracle") {
    Trajectory traj = metric_run(seeded_scenario(ModelKind::Basic));
    CHECK_THAT(retweets_per_tweet(traj), WithinRel(1.0238080233731028, 1e-9));
    CHECK_THAT(new_offenders_per_seed(traj), WithinRel(0.01882139354366727, 1e-9));
  }
  SECTION("full quarantine cuts the metric far below the no-quarantine value") {
    Trajectory none = metric_run(seeded_scenario(ModelKind::Quarantine, 1.0, 1.0));
    Trajectory full = metric_run(seeded_scenario(ModelKind::Quarantine, 0.0, 1.0));
    CHECK_THAT(retweets_per_tweet(full), WithinRel(0.009387296106437777, 1e-9));
    CHECK(retweets_per_tweet(full) < retweets_per_tweet(none));
  }
  SECTION("needs a seeded run") {
    ModelParams p;
    Trajectory traj = simulate(StateVector{0.93e7, 0.0, 0.0, 0.07e7}, p, 5, StopRule{-1.0});
    CHECK_THROWS_AS(retweets_per_tweet(traj), std::invalid_argument);
  }
}

TEST_CASE("extinction time and peaks") {
  Scenario sc = seeded_scenario(ModelKind::Quarantine, 0.5, 0.99);
  Trajectory traj = metric_run(sc);
  const long ext = extinction_time(traj, 0.5);
  CHECK(ext == 2);  // O+Q drops under half a user at the second step
  CHECK(peak_offenders(traj) == 1.0);
  CHECK(peak_quarantined(traj) > 0.0);
  CHECK(extinction_time(traj, -1.0) == static_cast<long>(traj.steps()));
}

TEST_CASE("sweep engine") {
  SECTION("lambda sweep is monotone in the quarantine level") {
    Scenario sc = seeded_scenario(ModelKind::Quarantine, 1.0, 1.0);
    sc.sweep = SweepSpec{"lambda", {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}};
    SweepResult result = run_sweep(sc);
    REQUIRE(result.rows.size() == 6);
    for (std::size_t i = 1; i < result.rows.size(); ++i)
      CHECK(result.rows[i].retweets_per_tweet > result.rows[i - 1].retweets_per_tweet);
    CHECK(result.rows.front().value == 0.0);
    CHECK(result.offender_series.empty());
  }
  SECTION("series are captured when asked") {
    Scenario sc = seeded_scenario(ModelKind::Quarantine, 1.0, 0.99);
    sc.emit_series = true;
    sc.sweep = SweepSpec{"lambda", {0.0, 1.0}};
    SweepResult result = run_sweep(sc);
    REQUIRE(result.offender_series.size() == 2);
    CHECK(result.offender_series[0].front() == 1.0);
  }
  SECTION("single-point sweep equals a plain run") {
    Scenario sc = seeded_scenario(ModelKind::Quarantine, 0.3, 0.9);
    sc.sweep = SweepSpec{"lambda", {0.3}};
    SweepResult result = run_sweep(sc);
    REQUIRE(result.rows.size() == 1);
    Trajectory direct = metric_run(sc);
    CHECK(result.rows[0].retweets_per_tweet == retweets_per_tweet(direct));
    CHECK(result.rows[0].extinction_time == extinction_time(direct, sc.stop));
    CHECK(result.rows[0].peak_q == peak_quarantined(direct));
  }
  SECTION("sweeping S0_frac") {
    Scenario sc = seeded_scenario(ModelKind::Basic);
    sc.sweep = SweepSpec{"S0_frac", {0.05, 0.07, 0.2}};
    SweepResult result = run_sweep(sc);
    REQUIRE(result.rows.size() == 3);
    CHECK_THAT(result.rows[1].retweets_per_tweet, WithinRel(1.0238080233731028, 1e-9));
    CHECK(result.rows[2].retweets_per_tweet < result.rows[0].retweets_per_tweet);
  }
  SECTION("errors") {
    Scenario sc = seeded_scenario(ModelKind::Basic);
    CHECK_THROWS_AS(run_sweep(sc), std::invalid_argument);  // no sweep
    sc.sweep = SweepSpec{"lambda", {0.0, 1.0}};
    CHECK_THROWS_AS(run_sweep(sc), std::invalid_argument);  // basic model
    Scenario quar = seeded_scenario(ModelKind::Quarantine);
    quar.sweep = SweepSpec{"flux", {0.0}};
    CHECK_THROWS_AS(run_sweep(quar), std::invalid_argument);  // unknown parameter
  }
}

TEST_CASE("trajectory CSV") {
  Scenario sc = seeded_scenario(ModelKind::Basic);
  sc.horizon = 1;
  Trajectory traj = run_scenario(sc);
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  std::istringstream in(out.str());
  csv::Reader reader(in);
  std::vector<csv::Record> rows;
  while (auto rec = reader.next()) rows.push_back(*rec);
  REQUIRE(rows.size() == 3);  // header + two states for horizon 1
  CHECK(rows[0].fields == std::vector<std::string>{"t", "U", "O", "Q", "S", "G1", "G2", "inflow",
                                                   "z_state"});
  CHECK(rows[1].fields[0] == "0");
  CHECK(rows[2].fields[0] == "1");
  // the z column round-trips as a number here
  CHECK(csv::parse_double(rows[1].fields[8]).has_value());

  SECTION("undefined threshold prints as nan") {
    Scenario bare = seeded_scenario(ModelKind::Basic);
    bare.s0_frac = 0.0;
    bare.horizon = 1;
    std::ostringstream text;
    write_trajectory_csv(text, run_scenario(bare));
    CHECK(text.str().find(",nan") != std::string::npos);
  }
}

TEST_CASE("sweep CSV") {
  Scenario sc = seeded_scenario(ModelKind::Quarantine, 1.0, 0.99);
  sc.emit_series = true;
  sc.sweep = SweepSpec{"lambda", {0.0, 0.5, 1.0}};
  SweepResult result = run_sweep(sc);
  std::ostringstream out;
  write_sweep_csv(out, result);
  std::istringstream in(out.str());
  csv::Reader reader(in);
  std::vector<csv::Record> rows;
  while (auto rec = reader.next()) rows.push_back(*rec);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].fields[0] == "lambda");
  CHECK(csv::parse_double(rows[1].fields[1]).value() < csv::parse_double(rows[3].fields[1]).value());

  std::ostringstream series;
  write_series_csv(series, result);
  CHECK(series.str().rfind("lambda,t,O\n", 0) == 0);
}

TEST_CASE("csv reader and writer round trip") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> len(0, 12);
  const std::string alphabet = "ab,\"\nx \t;0.5";
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> fields;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      std::string f;
      const int m = len(rng);
      for (int j = 0; j < m; ++j) f.push_back(alphabet[rng() % alphabet.size()]);
      fields.push_back(f);
    }
    // a record of one empty field is indistinguishable from a blank line
    if (fields.size() == 1 && fields[0].empty()) continue;
    std::ostringstream out;
    csv::write_row(out, fields);
    std::istringstream in(out.str());
    csv::Reader reader(in);
    const auto rec = reader.next();
    REQUIRE(rec.has_value());
    CHECK(rec->fields == fields);
  }
}

TEST_CASE("svg output") {
  Scenario sc = seeded_scenario(ModelKind::Quarantine, 0.5, 0.99);
  Trajectory traj = run_scenario(sc);
  std::ostringstream out;
  write_trajectory_svg(out, traj, "demo <chart> & more");
  const std::string text = out.str();
  CHECK(well_formed_xml(text));
  CHECK(text.find("demo &lt;chart&gt; &amp; more") != std::string::npos);
  // self-contained: no hyperlinks or image references
  CHECK(text.find("href") == std::string::npos);
  CHECK(text.find("<image") == std::string::npos);

  Scenario sw = seeded_scenario(ModelKind::Quarantine, 1.0, 0.99);
  sw.emit_series = true;
  sw.sweep = SweepSpec{"lambda", {0.0, 0.5, 1.0}};
  SweepResult result = run_sweep(sw);
  std::ostringstream sweep_svg, series_svg;
  write_sweep_svg(sweep_svg, result, "sweep");
  write_series_svg(series_svg, result, "series");
  CHECK(well_formed_xml(sweep_svg.str()));
  CHECK(well_formed_xml(series_svg.str()));
}

TEST_CASE("emission is deterministic") {
  Scenario sc = seeded_scenario(ModelKind::Quarantine, 0.5, 0.99);
  std::ostringstream a, b;
  write_trajectory_csv(a, run_scenario(sc));
  write_trajectory_csv(b, run_scenario(sc));
  CHECK(a.str() == b.str());

  Scenario sw = seeded_scenario(ModelKind::Quarantine, 1.0, 1.0);
  sw.sweep = SweepSpec{"lambda", {0.0, 0.5, 1.0}};
  std::ostringstream c, d;
  write_sweep_csv(c, run_sweep(sw));
  write_sweep_csv(d, run_sweep(sw));
  CHECK(c.str() == d.str());
}

TEST_CASE("trajectory audit flags broken invariants") {
  ModelParams p;
  Trajectory traj = simulate(StateVector{1e7 - 0.07e7 - 1.0, 1.0, 0.0, 0.07e7}, p, 10,
                             StopRule{0.0});
  CHECK(audit_trajectory(traj).empty());
  Trajectory broken = traj;
  broken.states[3].S = broken.states[2].S - 1.0;
  CHECK_FALSE(audit_trajectory(broken).empty());
  Trajectory drift = traj;
  drift.states[4].U += 1.0;
  CHECK_FALSE(audit_trajectory(drift).empty());
}
