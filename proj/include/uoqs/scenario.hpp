#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uoqs/csv.hpp"
#include "uoqs/metrics.hpp"
#include "uoqs/model.hpp"

namespace uoqs {

struct ScenarioError : std::invalid_argument {
  ScenarioError(std::size_t line, const std::string& msg)
      : std::invalid_argument("scenario line " + std::to_string(line) + ": " + msg), line(line) {}
  std::size_t line;
};

struct SweepSpec {
  std::string parameter;      ///< one of lambda, mu, alpha, k, S0_frac
  std::vector<double> grid;   ///< nonempty, ascending
};

/// A parsed experiment description: model constants, initial seeding
/// (absolute counts or fractions of N), run control and an optional sweep.
struct Scenario {
  std::string name = "scenario";
  ModelParams params;
  std::optional<double> u0, o0, q0, s0;                      ///< absolute users
  std::optional<double> u0_frac, o0_frac, q0_frac, s0_frac;  ///< of N
  long horizon = 10000;
  double stop = 0.5;                         ///< extinction threshold for plain runs
  double metric_stop = kMetricStopThreshold; ///< threshold for metric (sweep/fit) runs
  bool emit_series = false;                  ///< sweeps also dump per-point O_t series
  std::optional<SweepSpec> sweep;

  /// Resolve the initial state. Unset compartments default to O = 1 seed,
  /// Q = 0, S = 0.07 N, and U takes the remainder.
  StateVector initial_state() const {
    params.validate();
    auto resolve = [&](std::optional<double> abs_v, std::optional<double> frac_v, double fallback,
                       const char* what) {
      if (abs_v && frac_v)
        throw std::invalid_argument(std::string("scenario: ") + what +
                                    " given both absolute and fractional");
      double v = fallback;
      if (abs_v) v = *abs_v;
      if (frac_v) v = *frac_v * params.N;
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument(std::string("scenario: ") + what + " must be >= 0");
      return v;
    };
    StateVector s;
    s.O = resolve(o0, o0_frac, 1.0, "O0");
    s.Q = resolve(q0, q0_frac, 0.0, "Q0");
    s.S = resolve(s0, s0_frac, 0.07 * params.N, "S0");
    if (u0 || u0_frac) {
      s.U = resolve(u0, u0_frac, 0.0, "U0");
      if (conservation_drift(s, params) > kConservationTol)
        throw std::invalid_argument("scenario: initial compartments do not sum to N");
    } else {
      s.U = params.N - s.O - s.Q - s.S;
      if (s.U < 0.0) throw std::invalid_argument("scenario: initial seeding exceeds N");
    }
    validate_state(s, params);
    return s;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Parse the flat `key = value` scenario format. `#` starts a comment; a
/// `[sweep]` section introduces the sweep keys (parameter, from/to/step or
/// values). Unknown keys are errors, with line numbers.
inline Scenario parse_scenario(std::istream& in, const std::string& default_name = "scenario") {
  Scenario sc;
  sc.name = default_name;
  bool in_sweep = false;
  bool saw_model = false;
  std::optional<double> sweep_from, sweep_to, sweep_step;
  std::vector<double> sweep_values;
  std::string sweep_parameter;

  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = raw;
    const std::size_t hash = text.find('#');
    if (hash != std::string::npos) text.erase(hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    if (text == "[sweep]") {
      if (in_sweep) throw ScenarioError(line, "duplicate [sweep] section");
      in_sweep = true;
      continue;
    }
    if (text.front() == '[') throw ScenarioError(line, "unknown section " + text);
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) throw ScenarioError(line, "expected key = value");
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) throw ScenarioError(line, "expected key = value");

    auto number = [&]() {
      const std::optional<double> v = csv::parse_double(value);
      if (!v.has_value()) throw ScenarioError(line, "not a number: " + value);
      return *v;
    };
    auto boolean = [&]() {
      if (value == "true") return true;
      if (value == "false") return false;
      throw ScenarioError(line, "not a boolean: " + value);
    };

    if (in_sweep) {
      if (key == "parameter") sweep_parameter = value;
      else if (key == "from") sweep_from = number();
      else if (key == "to") sweep_to = number();
      else if (key == "step") sweep_step = number();
      else if (key == "values") {
        std::istringstream vs(value);
        std::string item;
        while (std::getline(vs, item, ',')) {
          const std::optional<double> v = csv::parse_double(detail::trim(item));
          if (!v.has_value()) throw ScenarioError(line, "not a number: " + item);
          sweep_values.push_back(*v);
        }
      } else {
        throw ScenarioError(line, "unknown sweep key " + key);
      }
      continue;
    }

    if (key == "name") sc.name = value;
    else if (key == "model") {
      saw_model = true;
      if (value == "basic") sc.params.kind = ModelKind::Basic;
      else if (value == "quarantine") sc.params.kind = ModelKind::Quarantine;
      else throw ScenarioError(line, "model must be basic or quarantine");
    }
    else if (key == "N") sc.params.N = number();
    else if (key == "k") sc.params.k = number();
    else if (key == "alpha") sc.params.alpha = number();
    else if (key == "lambda") sc.params.lambda = number();
    else if (key == "mu") sc.params.mu = number();
    else if (key == "u0") sc.u0 = number();
    else if (key == "o0") sc.o0 = number();
    else if (key == "q0") sc.q0 = number();
    else if (key == "s0") sc.s0 = number();
    else if (key == "u0_frac") sc.u0_frac = number();
    else if (key == "o0_frac") sc.o0_frac = number();
    else if (key == "q0_frac") sc.q0_frac = number();
    else if (key == "s0_frac") sc.s0_frac = number();
    else if (key == "horizon") sc.horizon = static_cast<long>(number());
    else if (key == "stop") sc.stop = number();
    else if (key == "metric_stop") sc.metric_stop = number();
    else if (key == "emit_series") sc.emit_series = boolean();
    else throw ScenarioError(line, "unknown key " + key);
  }

  if (!saw_model) throw ScenarioError(line, "missing required key: model");
  try {
    sc.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(line, e.what());
  }

  if (in_sweep) {
    SweepSpec spec;
    spec.parameter = sweep_parameter;
    static const std::vector<std::string> known = {"lambda", "mu", "alpha", "k", "S0_frac"};
    if (std::find(known.begin(), known.end(), spec.parameter) == known.end())
      throw ScenarioError(line, "sweep parameter must be one of lambda, mu, alpha, k, S0_frac");
    if (!sweep_values.empty()) {
      spec.grid = sweep_values;
    } else {
      if (!sweep_from || !sweep_to || !sweep_step || *sweep_step <= 0.0 || *sweep_to < *sweep_from)
        throw ScenarioError(line, "sweep needs values or from/to/step with step > 0");
      const long points = static_cast<long>((*sweep_to - *sweep_from) / *sweep_step + 1.5);
      for (long i = 0; i < points; ++i) {
        const double v = *sweep_from + static_cast<double>(i) * *sweep_step;
        if (v > *sweep_to + *sweep_step / 2.0) break;
        spec.grid.push_back(v);
      }
    }
    if (spec.grid.empty()) throw ScenarioError(line, "sweep grid is empty");
    for (std::size_t i = 1; i < spec.grid.size(); ++i)
      if (spec.grid[i] <= spec.grid[i - 1])
        throw ScenarioError(line, "sweep grid must be strictly ascending");
    sc.sweep = std::move(spec);
  }
  return sc;
}

inline Scenario parse_scenario_text(const std::string& text,
                                    const std::string& default_name = "scenario") {
  std::istringstream in(text);
  return parse_scenario(in, default_name);
}

}  // namespace uoqs
