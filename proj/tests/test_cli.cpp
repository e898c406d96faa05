#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string cli_bin() {
  const char* b = std::getenv("L0SCOPE_CLI_BIN");
  REQUIRE(b != nullptr);
  return b;
}

std::string data_dir() {
  const char* d = std::getenv("L0SCOPE_DATA_DIR");
  REQUIRE(d != nullptr);
  return d;
}

RunResult run_cli(const std::string& args) {
  RunResult result;
  const std::string cmd = cli_bin() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/l0scope_cli_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("enumerate prints the landscape in both formats") {
  RunResult table = run_cli("enumerate " + data_dir() + "/cs3.json --format table");
  CHECK(table.exit_code == 0);
  CHECK(table.out.find("2.125") != std::string::npos);
  CHECK(table.out.find("*") != std::string::npos);
  CHECK(table.out.find("8/8") != std::string::npos);

  RunResult structured = run_cli("enumerate " + data_dir() + "/cs3.json --format structured");
  REQUIRE(structured.exit_code == 0);
  const auto j = nlohmann::json::parse(structured.out);
  REQUIRE(j["minimizers"].size() == 8);
  const auto& best = j["minimizers"][j["global_min"].get<std::size_t>()];
  CHECK(best["f_value"].get<double>() == doctest::Approx(2.125).epsilon(1e-10));
  CHECK(best["x"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(best["x"][1].get<double>() == doctest::Approx(0.0));
  CHECK(best["x"][2].get<double>() == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("certify zero on the 1-D instance is critical with unit multiplier") {
  RunResult r = run_cli("certify " + data_dir() + "/1d.json --point zero --format structured");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["certificate"]["verdict"] == "critical");
  CHECK(j["certificate"]["lambda"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(j["theorem_check"]["consistent"].get<bool>());
}

TEST_CASE("solvers reach the known minimizers from zero") {
  for (const std::string method : {"iht", "pd"}) {
    RunResult r = run_cli("solve " + data_dir() + "/cs3.json --method " + method +
                          " --x0 zero --format structured");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["converged"].get<bool>());
    CHECK(j["final"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(j["final"][1].get<double>() == doctest::Approx(0.0));
    CHECK(j["final"][2].get<double>() == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(j["f_final"].get<double>() == doctest::Approx(2.125).epsilon(1e-9));
  }
}

TEST_CASE("verify-local refutes the midpoint of the 1-D instance") {
  const std::string point = write_temp("half.json", "{\"x\": [0.5]}");
  RunResult r = run_cli("verify-local " + data_dir() + "/1d.json --point " + point +
                        " --radius 0.3 --format structured");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "refuted");
  CHECK(j["f_witness"].get<double>() < j["f_center"].get<double>());

  RunResult ok = run_cli("verify-local " + data_dir() + "/1d.json --point zero" +
                         " --radius 0.3 --format structured");
  REQUIRE(ok.exit_code == 0);
  CHECK(nlohmann::json::parse(ok.out)["verdict"] == "not-refuted");
}

TEST_CASE("rank-demo reproduces the counterexample numbers") {
  RunResult r = run_cli("rank-demo --format structured");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["matrix"]["critical"].get<bool>());
  CHECK(j["matrix"]["criticality_residual"].get<double>() <= 1e-12);
  CHECK(j["matrix_refuted"].get<bool>());
  CHECK(j["neg_gradient"][0][0].get<double>() == doctest::Approx(3.0));
  CHECK(j["neg_gradient"][1][1].get<double>() == doctest::Approx(3.0));
  for (const auto& entry : j["curve"]) {
    CHECK(entry["rank"].get<int>() == 1);
    CHECK(entry["f_decrease"].get<double>() < 0.0);
  }
  CHECK(!j["matrix_implication_held"].get<bool>());
}

TEST_CASE("rank-certify consumes matrix files") {
  RunResult r = run_cli("rank-certify " + data_dir() + "/rank_target.json " + data_dir() +
                        "/rank_point.json --format structured");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["matrix"]["critical"].get<bool>());
  CHECK(j["matrix"]["rank"].get<int>() == 1);
  CHECK(j["matrix_refuted"].get<bool>());
}

TEST_CASE("exit codes: validation, non-convergence, inconsistency") {
  CHECK(run_cli("enumerate /nonexistent.json").exit_code == 1);

  const std::string bad = write_temp("bad.json", "{\"f1\": {\"Q\": [[1, 2], [2");
  CHECK(run_cli("enumerate " + bad).exit_code == 1);

  // Penalty schedule cut off before the splitting gap can close.
  CHECK(run_cli("solve " + data_dir() + "/cs3.json --method pd --rho-max 2 --pd-tol 1e-12")
            .exit_code == 2);

  // An absurd criticality tolerance forges a "critical" verdict at a point
  // that visibly fails the local-minimality cross-check: the self-test
  // channel must fire.
  const std::string half = write_temp("half2.json", "{\"x\": [0.5]}");
  CHECK(run_cli("certify " + data_dir() + "/1d.json --point " + half + " --crit-tol 1e6")
            .exit_code == 3);

  // Oversized enumeration cap.
  CHECK(run_cli("enumerate " + data_dir() + "/cs3.json --max-M 2").exit_code == 1);
}

TEST_CASE("structured output is byte-identical across runs") {
  const std::string args = "enumerate " + data_dir() + "/fd4.json --format structured";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);

  RunResult c = run_cli("rank-demo --format structured");
  RunResult d = run_cli("rank-demo --format structured");
  CHECK(c.out == d.out);
}

TEST_CASE("--output writes the structured report to a file") {
  const std::string out_path = "/tmp/l0scope_cli_report.json";
  std::remove(out_path.c_str());
  RunResult r = run_cli("enumerate " + data_dir() + "/1d.json --output " + out_path +
                        " --format table");
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out_path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  CHECK(j["minimizers"].size() == 2);
}

TEST_CASE("environment variables override tolerances") {
  // A huge zero tolerance makes every g component read as zero, so the only
  // support left is the empty one.
  RunResult r = run_cli("enumerate " + data_dir() +
                        "/1d.json --format structured --zero-tol 100");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  for (const auto& e : j["minimizers"]) CHECK(e["supp_actual"].empty());

  const std::string cmd = "L0SCOPE_ZERO_TOL=100 " + cli_bin() + " enumerate " + data_dir() +
                          "/1d.json --format structured 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  CHECK(out == r.out);
}
