#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uoqs/csv.hpp"
#include "uoqs/dynamics.hpp"
#include "uoqs/metrics.hpp"
#include "uoqs/scenario.hpp"
#include "uoqs/svg.hpp"
#include "uoqs/thresholds.hpp"

namespace uoqs {

/// Simulate a scenario as written (its own stop rule and horizon).
inline Trajectory run_scenario(const Scenario& sc) {
  return simulate(sc.initial_state(), sc.params, sc.horizon, StopRule{sc.stop});
}

/// Post-hoc invariant audit of an emitted trajectory: conservation,
/// non-negativity, monotone U and S. Returns a violation message or empty.
inline std::string audit_trajectory(const Trajectory& traj) {
  const ModelParams& p = traj.params;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const StateVector& s = traj.states[i];
    if (conservation_drift(s, p) > kConservationTol)
      return "conservation violated at t=" + std::to_string(s.t);
    if (s.U < 0.0 || s.O < 0.0 || s.Q < 0.0 || s.S < 0.0)
      return "negative compartment at t=" + std::to_string(s.t);
    if (i > 0) {
      const StateVector& prev = traj.states[i - 1];
      if (s.S < prev.S) return "stifler class shrank at t=" + std::to_string(s.t);
      if (s.U > prev.U) return "uninformed class grew at t=" + std::to_string(s.t);
      // strict decrease is only demanded where a whole offender is present;
      // below that the per-step decrement can fall under one ulp of U
      if (prev.U >= 1.0 && prev.O >= 0.5 && !(s.U < prev.U))
        return "uninformed class failed to shrink at t=" + std::to_string(s.t);
    }
  }
  return "";
}

/// One sweep grid point.
struct SweepRow {
  double value = 0.0;  ///< swept parameter value
  double retweets_per_tweet = 0.0;
  long extinction_time = 0;  ///< first t with O + Q below the scenario stop
  double peak_o = 0.0;
  double peak_q = 0.0;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
  /// full O_t series per grid point, populated when the scenario asks
  std::vector<std::vector<double>> offender_series;
};

/// Copy of the scenario with the swept parameter set to `value`.
inline Scenario with_sweep_value(const Scenario& sc, const std::string& parameter, double value) {
  Scenario out = sc;
  if (parameter == "lambda") out.params.lambda = value;
  else if (parameter == "mu") out.params.mu = value;
  else if (parameter == "alpha") out.params.alpha = value;
  else if (parameter == "k") out.params.k = value;
  else if (parameter == "S0_frac") {
    out.s0.reset();
    out.s0_frac = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter " + parameter);
  }
  return out;
}

/// Run one simulation per grid point, in grid order. Metric runs go to
/// numerical extinction (scenario metric_stop); the extinction-time column
/// still reports the first crossing of the scenario's own stop threshold.
inline SweepResult run_sweep(const Scenario& sc) {
  if (!sc.sweep.has_value()) throw std::invalid_argument("run_sweep: scenario has no sweep");
  if ((sc.sweep->parameter == "lambda" || sc.sweep->parameter == "mu") &&
      sc.params.kind != ModelKind::Quarantine)
    throw std::invalid_argument("run_sweep: sweeping " + sc.sweep->parameter +
                                " requires the quarantine model");
  SweepResult result;
  result.parameter = sc.sweep->parameter;
  for (double value : sc.sweep->grid) {
    const Scenario point = with_sweep_value(sc, sc.sweep->parameter, value);
    const Trajectory traj =
        simulate(point.initial_state(), point.params, point.horizon, StopRule{point.metric_stop});
    const std::string violation = audit_trajectory(traj);
    if (!violation.empty())
      throw std::logic_error("sweep point " + csv::format_double(value) + ": " + violation);
    SweepRow row;
    row.value = value;
    row.retweets_per_tweet = retweets_per_tweet(traj);
    row.extinction_time = extinction_time(traj, point.stop);
    row.peak_o = peak_offenders(traj);
    row.peak_q = peak_quarantined(traj);
    result.rows.push_back(row);
    if (sc.emit_series) {
      std::vector<double> series;
      series.reserve(traj.states.size());
      for (const StateVector& s : traj.states) series.push_back(s.O);
      result.offender_series.push_back(std::move(series));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV and SVG emission

/// Header: t,U,O,Q,S,G1,G2,inflow,z_state. G1/G2/inflow are evaluated at each
/// row's state (for the last row, the values the next transition would use);
/// an undefined threshold prints as nan.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const ModelParams& p = traj.params;
  csv::write_row(out, {"t", "U", "O", "Q", "S", "G1", "G2", "inflow", "z_state"});
  for (const StateVector& s : traj.states) {
    const std::optional<double> z = z_state(s, p);
    csv::write_row(out, {std::to_string(s.t), csv::format_double(s.U), csv::format_double(s.O),
                         csv::format_double(s.Q), csv::format_double(s.S),
                         csv::format_double(g1(s, p)), csv::format_double(g2(s, p)),
                         csv::format_double(offender_inflow(s, p)),
                         z ? csv::format_double(*z) : "nan"});
  }
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  csv::write_row(out, {result.parameter, "retweets_per_tweet", "extinction_time", "peak_O",
                       "peak_Q"});
  for (const SweepRow& row : result.rows)
    csv::write_row(out, {csv::format_double(row.value), csv::format_double(row.retweets_per_tweet),
                         std::to_string(row.extinction_time), csv::format_double(row.peak_o),
                         csv::format_double(row.peak_q)});
}

/// Long-format offender series: one row per (grid value, t).
inline void write_series_csv(std::ostream& out, const SweepResult& result) {
  csv::write_row(out, {result.parameter, "t", "O"});
  for (std::size_t i = 0; i < result.offender_series.size(); ++i)
    for (std::size_t t = 0; t < result.offender_series[i].size(); ++t)
      csv::write_row(out, {csv::format_double(result.rows[i].value), std::to_string(t),
                           csv::format_double(result.offender_series[i][t])});
}

inline void write_trajectory_svg(std::ostream& out, const Trajectory& traj,
                                 const std::string& title) {
  std::vector<svg::Series> series(traj.params.kind == ModelKind::Quarantine ? 4 : 3);
  series[0].label = "uninformed";
  series[1].label = "offenders";
  series.back().label = "stiflers";
  if (series.size() == 4) series[2].label = "quarantined";
  for (const StateVector& s : traj.states) {
    const double t = static_cast<double>(s.t);
    series[0].points.emplace_back(t, s.U);
    series[1].points.emplace_back(t, s.O);
    if (series.size() == 4) series[2].points.emplace_back(t, s.Q);
    series.back().points.emplace_back(t, s.S);
  }
  svg::write_line_chart(out, title, "step", "users", series);
}

inline void write_sweep_svg(std::ostream& out, const SweepResult& result,
                            const std::string& title) {
  svg::Series line;
  line.label = "retweets per tweet";
  for (const SweepRow& row : result.rows)
    line.points.emplace_back(row.value, row.retweets_per_tweet);
  svg::write_line_chart(out, title, result.parameter, "retweets per tweet", {line});
}

inline void write_series_svg(std::ostream& out, const SweepResult& result,
                             const std::string& title) {
  std::vector<svg::Series> series;
  for (std::size_t i = 0; i < result.offender_series.size(); ++i) {
    svg::Series s;
    s.label = result.parameter + " = " + csv::format_double(result.rows[i].value);
    for (std::size_t t = 0; t < result.offender_series[i].size(); ++t)
      s.points.emplace_back(static_cast<double>(t), result.offender_series[i][t]);
    series.push_back(std::move(s));
  }
  svg::write_line_chart(out, title, "step", "offenders", series);
}

}  // namespace uoqs
