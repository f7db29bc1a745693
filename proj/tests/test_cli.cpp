// End-to-end checks of the command-line interface and its exit-code
// contract: 0 ok, 1 config error, 2 I/O error.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UOQS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string capture_cli(const std::string& args) {
  const fs::path tmp = fs::temp_directory_path() / "uoqs_cli_capture.txt";
  const std::string cmd =
      std::string(UOQS_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>/dev/null";
  REQUIRE(std::system(cmd.c_str()) != -1);
  std::ifstream in(tmp);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("run subcommand") {
  const fs::path dir = fresh_dir("uoqs_cli_run");
  CHECK(run_cli("run --preset fig2 --out " + dir.string() + " --svg") == 0);
  CHECK(fs::exists(dir / "fig2_trajectory.csv"));
  CHECK(fs::exists(dir / "fig2.svg"));

  SECTION("horizon override caps the row count") {
    const fs::path short_dir = fresh_dir("uoqs_cli_run_short");
    CHECK(run_cli("run --preset fig2 --out " + short_dir.string() + " --horizon 1") == 0);
    std::ifstream in(short_dir / "fig2_trajectory.csv");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 3);  // header + two states
  }
}

TEST_CASE("sweep subcommand") {
  const fs::path dir = fresh_dir("uoqs_cli_sweep");
  CHECK(run_cli("sweep --preset fig5 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "fig5_sweep.csv"));
  CHECK(fs::exists(dir / "fig5_series.csv"));
  // a preset without a sweep section is a config error under `sweep`
  CHECK(run_cli("sweep --preset fig2 --out " + dir.string()) == 1);
}

TEST_CASE("analyze subcommand") {
  const std::string text = capture_cli("analyze --preset fig3");
  CHECK(text.find("lambda_critical: 0.99") != std::string::npos);
  CHECK(text.find("decline_guaranteed: yes") != std::string::npos);
  CHECK(text.find("verdict: indeterminate") != std::string::npos);
  const std::string basic = capture_cli("analyze --preset fig2");
  CHECK(basic.find("z_global: undefined") != std::string::npos);
  CHECK(basic.find("verdict: unstable") != std::string::npos);

  SECTION("eigenvalue table") {
    const fs::path dir = fresh_dir("uoqs_cli_analyze");
    CHECK(run_cli("analyze --preset fig2 --out " + dir.string()) == 0);
    std::ifstream in(dir / "fig2_eigenvalues.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "equilibrium,label,system,source,re,im");
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(body.find("offender-only,full,numeric") != std::string::npos);
    CHECK(body.find(",analytic,") != std::string::npos);
  }
}

TEST_CASE("calibrate subcommand") {
  const std::string text = capture_cli("calibrate " UOQS_DATA_DIR "/sample_corpus.csv");
  CHECK(text.find("total_tweets: 884") != std::string::npos);
  CHECK(text.find("original_tweets: 478") != std::string::npos);
  CHECK(text.find("alpha_estimate: 0.99826") != std::string::npos);

  SECTION("exit codes") {
    CHECK(run_cli("calibrate /nonexistent/corpus.csv") == 2);
    const fs::path dir = fresh_dir("uoqs_cli_cal");
    const fs::path bad = dir / "bad.csv";
    std::ofstream(bad) << "wrong,header\n1,2\n";
    CHECK(run_cli("calibrate " + bad.string()) == 1);
  }
}

TEST_CASE("fit-s0 subcommand") {
  const std::string text = capture_cli("fit-s0 --from 0.05 --to 0.1 --step 0.01");
  CHECK(text.find("best_s0_frac: 0.07") != std::string::npos);
}

TEST_CASE("config and io errors") {
  CHECK(run_cli("run --preset nope") == 1);
  CHECK(run_cli("run") == 1);  // neither --scenario nor --preset
  CHECK(run_cli("run --scenario /nonexistent.scenario") == 2);
  CHECK(run_cli("definitely-not-a-subcommand") == 1);
}
