// uoqs: simulate and analyze discrete-time message-spread dynamics with an
// optional quarantine class. Subcommands: run, sweep, analyze, calibrate,
// fit-s0. Exit codes: 0 ok, 1 config error, 2 I/O error, 3 invariant
// violation detected in outputs.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "uoqs/calibration.hpp"
#include "uoqs/experiments.hpp"
#include "uoqs/presets.hpp"
#include "uoqs/scenario.hpp"
#include "uoqs/stability.hpp"
#include "uoqs/thresholds.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitInvariant = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioSource {
  std::string scenario_path;
  std::string preset;
  long horizon_override = -1;
};

uoqs::Scenario load_scenario(const ScenarioSource& src) {
  if (src.scenario_path.empty() == src.preset.empty())
    throw std::invalid_argument("give exactly one of --scenario or --preset");
  uoqs::Scenario sc;
  if (!src.preset.empty()) {
    const std::optional<std::string_view> text = uoqs::presets::lookup(src.preset);
    if (!text.has_value()) {
      std::string known;
      for (const auto& n : uoqs::presets::names) known += " " + std::string(n);
      throw std::invalid_argument("unknown preset " + src.preset + "; available:" + known);
    }
    sc = uoqs::parse_scenario_text(std::string(*text), src.preset);
  } else {
    std::ifstream in(src.scenario_path);
    if (!in.good()) throw IoError("cannot read scenario file " + src.scenario_path);
    sc = uoqs::parse_scenario(in, std::filesystem::path(src.scenario_path).stem().string());
  }
  if (src.horizon_override > 0) sc.horizon = src.horizon_override;
  return sc;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out.good()) throw IoError("cannot write " + path.string());
  return out;
}

std::filesystem::path ensure_out_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory " + dir);
  return p;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string opt_str(const std::optional<double>& v) {
  return v.has_value() ? uoqs::csv::format_double(*v) : "undefined";
}

int cmd_run(const ScenarioSource& src, const std::string& out_dir, bool emit_svg) {
  const uoqs::Scenario sc = load_scenario(src);
  const uoqs::Trajectory traj = uoqs::run_scenario(sc);
  const std::string violation = uoqs::audit_trajectory(traj);
  if (!violation.empty()) {
    std::cerr << "invariant violation: " << violation << "\n";
    return kExitInvariant;
  }
  const std::filesystem::path dir = ensure_out_dir(out_dir);
  const std::filesystem::path csv_path = dir / (sc.name + "_trajectory.csv");
  {
    std::ofstream out = open_output(csv_path);
    uoqs::write_trajectory_csv(out, traj);
  }
  std::cout << "wrote " << csv_path.string() << "\n";
  if (emit_svg) {
    const std::filesystem::path svg_path = dir / (sc.name + ".svg");
    std::ofstream out = open_output(svg_path);
    uoqs::write_trajectory_svg(out, traj, sc.name);
    std::cout << "wrote " << svg_path.string() << "\n";
  }
  const uoqs::StateVector& last = traj.final_state();
  std::cout << "steps: " << traj.steps() << "\n"
            << "final: U=" << uoqs::csv::format_double(last.U)
            << " O=" << uoqs::csv::format_double(last.O)
            << " Q=" << uoqs::csv::format_double(last.Q)
            << " S=" << uoqs::csv::format_double(last.S) << "\n";
  return kExitOk;
}

int cmd_sweep(const ScenarioSource& src, const std::string& out_dir, bool emit_svg) {
  const uoqs::Scenario sc = load_scenario(src);
  if (!sc.sweep.has_value())
    throw std::invalid_argument("scenario " + sc.name + " has no [sweep] section");
  const uoqs::SweepResult result = uoqs::run_sweep(sc);
  const std::filesystem::path dir = ensure_out_dir(out_dir);
  const std::filesystem::path csv_path = dir / (sc.name + "_sweep.csv");
  {
    std::ofstream out = open_output(csv_path);
    uoqs::write_sweep_csv(out, result);
  }
  std::cout << "wrote " << csv_path.string() << "\n";
  if (sc.emit_series) {
    const std::filesystem::path series_path = dir / (sc.name + "_series.csv");
    std::ofstream out = open_output(series_path);
    uoqs::write_series_csv(out, result);
    std::cout << "wrote " << series_path.string() << "\n";
  }
  if (emit_svg) {
    const std::filesystem::path svg_path = dir / (sc.name + ".svg");
    std::ofstream out = open_output(svg_path);
    uoqs::write_sweep_svg(out, result, sc.name);
    std::cout << "wrote " << svg_path.string() << "\n";
    if (sc.emit_series) {
      const std::filesystem::path s2 = dir / (sc.name + "_series.svg");
      std::ofstream out2 = open_output(s2);
      uoqs::write_series_svg(out2, result, sc.name + " offender series");
      std::cout << "wrote " << s2.string() << "\n";
    }
  }
  std::cout << "points: " << result.rows.size() << "\n";
  return kExitOk;
}

int cmd_analyze(const ScenarioSource& src, const std::string& out_dir) {
  const uoqs::Scenario sc = load_scenario(src);
  const uoqs::StateVector initial = sc.initial_state();
  const uoqs::ThresholdReport thresholds = uoqs::threshold_report(initial, sc.params);
  const uoqs::StabilityReport stability = uoqs::build_stability_report(sc.params, initial.U);

  std::cout << "scenario: " << sc.name << "\n"
            << "model: " << uoqs::to_string(sc.params.kind) << "\n"
            << "N: " << uoqs::csv::format_double(sc.params.N) << "\n"
            << "k: " << uoqs::csv::format_double(sc.params.k) << "\n"
            << "alpha: " << uoqs::csv::format_double(sc.params.alpha) << "\n";
  if (sc.params.kind == uoqs::ModelKind::Quarantine)
    std::cout << "lambda: " << uoqs::csv::format_double(sc.params.lambda) << "\n"
              << "mu: " << uoqs::csv::format_double(sc.params.mu) << "\n";
  std::cout << "z_state_t0: " << opt_str(thresholds.z_state) << "\n"
            << "z_global: " << opt_str(thresholds.z_global) << "\n"
            << "lambda_critical: " << opt_str(thresholds.lambda_critical) << "\n"
            << "predicts_decline: " << yes_no(thresholds.predicts_decline) << "\n"
            << "decline_guaranteed: " << yes_no(thresholds.decline_guaranteed) << "\n";

  for (std::size_t i = 0; i < stability.entries.size(); ++i) {
    const uoqs::EquilibriumAnalysis& e = stability.entries[i];
    const std::string tag = "equilibrium[" + std::to_string(i) + "].";
    const uoqs::StateVector& st = e.equilibrium.state;
    std::cout << tag << "label: " << e.equilibrium.label << "\n"
              << tag << "state: U=" << uoqs::csv::format_double(st.U)
              << " O=" << uoqs::csv::format_double(st.O)
              << " Q=" << uoqs::csv::format_double(st.Q)
              << " S=" << uoqs::csv::format_double(st.S) << "\n"
              << tag << "verdict: " << e.verdict << "\n";
    if (!e.evaluated) continue;
    std::cout << tag << "jury_applicable: " << yes_no(e.jury_applicable) << "\n";
    if (e.ngm_radius.has_value())
      std::cout << tag << "ngm_radius: " << uoqs::csv::format_double(*e.ngm_radius) << "\n";
    if (!e.analytic_eigenvalues.empty())
      std::cout << tag
                << "analytic_matches_numeric: " << yes_no(e.analytic_matches_numeric) << "\n";
  }

  if (!out_dir.empty()) {
    const std::filesystem::path dir = ensure_out_dir(out_dir);
    const std::filesystem::path eig_path = dir / (sc.name + "_eigenvalues.csv");
    std::ofstream out = open_output(eig_path);
    uoqs::csv::write_row(out, {"equilibrium", "label", "system", "source", "re", "im"});
    for (std::size_t i = 0; i < stability.entries.size(); ++i) {
      const uoqs::EquilibriumAnalysis& e = stability.entries[i];
      if (!e.evaluated) continue;
      auto emit = [&](const std::string& system, const std::string& source,
                      const std::complex<double>& v) {
        uoqs::csv::write_row(out, {std::to_string(i), e.equilibrium.label, system, source,
                                   uoqs::csv::format_double(v.real()),
                                   uoqs::csv::format_double(v.imag())});
      };
      for (const auto& v : e.eigenvalues) emit("full", "numeric", v);
      for (const auto& v : e.eigenvalues_reduced) emit("reduced", "numeric", v);
      for (double v : e.analytic_eigenvalues) emit("full", "analytic", {v, 0.0});
    }
    std::cout << "wrote " << eig_path.string() << "\n";
  }
  return kExitOk;
}

int cmd_calibrate(const std::string& corpus_path, const std::string& out_dir) {
  std::ifstream in(corpus_path);
  if (!in.good()) throw IoError("cannot read corpus " + corpus_path);
  const uoqs::IngestReport report = uoqs::ingest_csv(in);
  const uoqs::CorpusStats& s = report.stats;

  for (std::size_t i = 0; i < report.errors.size(); ++i) {
    if (i >= 10) {
      std::cerr << "... " << report.errors.size() - i << " more malformed rows\n";
      break;
    }
    std::cerr << "line " << report.errors[i].line << ": " << report.errors[i].message << "\n";
  }

  std::cout << "total_tweets: " << s.total_tweets << "\n"
            << "original_tweets: " << s.original_tweets << "\n"
            << "retweet_count: " << s.retweet_count << "\n"
            << "originals_retweeted_at_least_once: " << s.originals_retweeted_at_least_once << "\n"
            << "friends_of_offenders_sum: " << s.friends_of_offenders_sum << "\n"
            << "malformed_rows: " << report.errors.size() << "\n";
  const std::optional<double> dup = s.mean_duplication();
  const std::optional<double> copies = s.mean_copies_per_original();
  std::cout << "mean_duplication: " << opt_str(dup) << "\n"
            << "mean_copies_per_original: " << opt_str(copies) << "\n";
  std::string alpha_orig = "undefined", alpha_rt = "undefined";
  try {
    alpha_orig = uoqs::csv::format_double(uoqs::estimate_alpha(s));
  } catch (const std::invalid_argument& e) {
    alpha_orig = std::string("error: ") + e.what();
  }
  try {
    alpha_rt =
        uoqs::csv::format_double(uoqs::estimate_alpha(s, uoqs::AlphaNumerator::Retweets));
  } catch (const std::invalid_argument& e) {
    alpha_rt = std::string("error: ") + e.what();
  }
  std::cout << "alpha_estimate: " << alpha_orig << "\n"
            << "alpha_estimate_retweet_numerator: " << alpha_rt << "\n";
  // mean network degree for the usual exponent range, 20-follower cutoff
  for (double gamma : {2.0, 2.5, 3.0})
    std::cout << "mean_degree_powerlaw(gamma=" << uoqs::csv::format_double(gamma)
              << ",m_max=20): " << uoqs::csv::format_double(uoqs::mean_degree_powerlaw(gamma, 20))
              << "\n";

  if (!out_dir.empty()) {
    const std::filesystem::path dir = ensure_out_dir(out_dir);
    const std::filesystem::path path = dir / "calibration_stats.csv";
    std::ofstream out = open_output(path);
    uoqs::csv::write_row(out, {"key", "value"});
    uoqs::csv::write_row(out, {"total_tweets", std::to_string(s.total_tweets)});
    uoqs::csv::write_row(out, {"original_tweets", std::to_string(s.original_tweets)});
    uoqs::csv::write_row(out, {"retweet_count", std::to_string(s.retweet_count)});
    uoqs::csv::write_row(out, {"originals_retweeted_at_least_once",
                               std::to_string(s.originals_retweeted_at_least_once)});
    uoqs::csv::write_row(out, {"friends_of_offenders_sum",
                               std::to_string(s.friends_of_offenders_sum)});
    uoqs::csv::write_row(out, {"malformed_rows", std::to_string(report.errors.size())});
    uoqs::csv::write_row(out, {"mean_duplication", opt_str(dup)});
    uoqs::csv::write_row(out, {"mean_copies_per_original", opt_str(copies)});
    uoqs::csv::write_row(out, {"alpha_estimate", alpha_orig});
    uoqs::csv::write_row(out, {"alpha_estimate_retweet_numerator", alpha_rt});
    std::cout << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_fit_s0(const ScenarioSource& src, double target, double from, double to, double step,
               const std::string& out_dir) {
  uoqs::ModelParams params;  // reference scenario unless one is supplied
  std::string name = "fit_s0";
  if (!src.scenario_path.empty() || !src.preset.empty()) {
    const uoqs::Scenario sc = load_scenario(src);
    params = sc.params;
    name = sc.name + "_fit_s0";
  }
  const uoqs::FitResult fit = uoqs::fit_s0(params, target, uoqs::FitGrid{from, to, step});
  std::cout << "target: " << uoqs::csv::format_double(fit.target) << "\n"
            << "best_s0_frac: " << uoqs::csv::format_double(fit.s0_frac) << "\n"
            << "predicted_retweets_per_tweet: " << uoqs::csv::format_double(fit.predicted)
            << "\n";
  if (!out_dir.empty()) {
    const std::filesystem::path dir = ensure_out_dir(out_dir);
    const std::filesystem::path path = dir / (name + "_grid.csv");
    std::ofstream out = open_output(path);
    uoqs::csv::write_row(out, {"s0_frac", "retweets_per_tweet"});
    for (const auto& [frac, value] : fit.grid)
      uoqs::csv::write_row(out, {uoqs::csv::format_double(frac), uoqs::csv::format_double(value)});
    std::cout << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete-time simulator for message spread with quarantine"};
  app.require_subcommand(1);

  ScenarioSource src;
  std::string out_dir = ".";
  bool emit_svg = false;

  auto add_scenario_opts = [&](CLI::App* cmd, bool with_svg = true) {
    cmd->add_option("--scenario", src.scenario_path, "scenario file (key = value format)");
    cmd->add_option("--preset", src.preset, "built-in scenario: fig2, fig3, fig4 or fig5");
    cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    cmd->add_option("--horizon", src.horizon_override, "override the scenario horizon");
    if (with_svg) cmd->add_flag("--svg", emit_svg, "also emit an SVG chart");
  };

  CLI::App* run = app.add_subcommand("run", "simulate one trajectory and write it as CSV");
  add_scenario_opts(run);

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep and write the table");
  add_scenario_opts(sweep);

  CLI::App* analyze =
      app.add_subcommand("analyze", "thresholds, equilibria, eigenvalues and stability");
  analyze->add_option("--scenario", src.scenario_path, "scenario file");
  analyze->add_option("--preset", src.preset, "built-in scenario");
  std::string analyze_out;
  analyze->add_option("--out", analyze_out, "directory for the eigenvalue CSV");

  CLI::App* calibrate = app.add_subcommand("calibrate", "aggregate a tweet-corpus CSV");
  std::string corpus_path;
  std::string calibrate_out;
  calibrate->add_option("corpus", corpus_path, "corpus CSV path")->required();
  calibrate->add_option("--out", calibrate_out, "directory for the stats CSV");

  CLI::App* fit = app.add_subcommand("fit-s0", "grid-fit the initial stifler share");
  double target = 1.0, fit_from = 0.01, fit_to = 1.0, fit_step = 0.01;
  fit->add_option("--target", target, "observed retweets per tweet")->capture_default_str();
  fit->add_option("--from", fit_from, "grid start")->capture_default_str();
  fit->add_option("--to", fit_to, "grid stop")->capture_default_str();
  fit->add_option("--step", fit_step, "grid step")->capture_default_str();
  fit->add_option("--scenario", src.scenario_path, "scenario file supplying model constants");
  fit->add_option("--preset", src.preset, "built-in scenario supplying model constants");
  std::string fit_out;
  fit->add_option("--out", fit_out, "directory for the grid CSV");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(src, out_dir, emit_svg);
    if (sweep->parsed()) return cmd_sweep(src, out_dir, emit_svg);
    if (analyze->parsed()) return cmd_analyze(src, analyze_out);
    if (calibrate->parsed()) return cmd_calibrate(corpus_path, calibrate_out);
    if (fit->parsed()) return cmd_fit_s0(src, target, fit_from, fit_to, fit_step, fit_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
