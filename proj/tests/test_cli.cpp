// End-to-end tests of the osmoflow command-line tool.  The binary path comes
// from the OSMOFLOW_BIN environment variable (set by CTest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "osmoflow/field.hpp"
#include "osmoflow/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string binary_path() {
  const char* p = std::getenv("OSMOFLOW_BIN");
  REQUIRE_MESSAGE(p != nullptr, "OSMOFLOW_BIN must point at the CLI binary");
  return p;
}

RunResult run(const std::string& args, bool merge_stderr = false) {
  const std::string cmd =
      binary_path() + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe))
    r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path workspace() {
  auto d = fs::temp_directory_path() / "osmoflow_cli_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("version and help exit cleanly") {
  const RunResult v = run("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("0.1.0") != std::string::npos);

  CHECK(run("--help").exit_code == 0);
  CHECK(run("").exit_code == 2);             // a subcommand is required
  CHECK(run("frobnicate").exit_code == 2);   // unknown subcommand
}

TEST_CASE("missing or invalid configuration maps to exit code 2") {
  CHECK(run("spectrum --params /nonexistent/nowhere.toml").exit_code == 2);

  const auto bad = workspace() / "bad.toml";
  spit(bad, "[params]\nnu_minus = -1.0\n");
  CHECK(run("verify-all --params " + bad.string()).exit_code == 2);
}

TEST_CASE("equilibrium subcommand reports roots as JSON") {
  // M+ = 2.2 pi, M- = 3 pi
  const RunResult r =
      run("equilibrium --m+ 6.911503837897546 --m- 9.42477796076938 --rc 2");
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("found").get<bool>());
  REQUIRE(j.at("roots").size() == 1);
  CHECK(j.at("roots")[0].at("R_star").get<double>() ==
        doctest::Approx(1.0521197673).epsilon(1e-8));
  CHECK(j.at("tool").get<std::string>() == "osmoflow");
  CHECK(j.contains("version"));
  CHECK(j.contains("config_hash"));

  // no equilibrium is still a clean exit, with found = false
  const RunResult none = run("equilibrium --m+ 1e-4 --m- 1e-4 --rc 2");
  CHECK(none.exit_code == 0);
  CHECK_FALSE(json::parse(none.out).at("found").get<bool>());
}

TEST_CASE("stokes subcommand reports the curvature response") {
  const RunResult r = run("stokes --k 2");
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("k").get<int>() == 2);
  CHECK(j.at("v_interface").get<double>() ==
        doctest::Approx(-27.0 / 128.0).epsilon(1e-8));
  CHECK(j.contains("residuals"));
}

TEST_CASE("verify-ls subcommand reports the boundary symbol") {
  const RunResult r = run("verify-ls --nu+ 2 --nu- 3");
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("det_M").at("re").get<double>() ==
        doctest::Approx(-50.0).epsilon(1e-12));
  CHECK(j.at("expected_det").get<double>() ==
        doctest::Approx(-50.0).epsilon(1e-12));
  CHECK(j.at("min_singular_value").get<double>() > 0.0);
}

TEST_CASE("simulate runs end to end and writes provenance-stamped outputs") {
  const auto dir = workspace() / "sim";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto init = dir / "init.json";
  osmoflow::save_state(
      osmoflow::make_uniform_state(1.0, 2.0, 65, 65,
                                   [](double) { return 2.2; },
                                   [](double) { return 1.0; }),
      init.string());

  const RunResult r = run("simulate --init " + init.string() +
                          " --dt 1e-3 --tfinal 0.05 --out " + dir.string());
  CHECK(r.exit_code == 0);

  const std::string traj = slurp(dir / "trajectory.csv");
  REQUIRE(!traj.empty());
  CHECK(traj.rfind("# osmoflow version=", 0) == 0);  // metadata line first
  CHECK(traj.find("config_hash=") != std::string::npos);
  CHECK(traj.find("t,R,M_plus,M_minus,E,D,distance_to_equilibrium") !=
        std::string::npos);
  CHECK(traj.find("\r") == std::string::npos);  // LF line endings only

  // R must have grown under the osmotic imbalance
  std::istringstream lines(traj);
  std::string line, first_data, last_data;
  std::getline(lines, line);  // metadata
  std::getline(lines, line);  // header
  while (std::getline(lines, line))
    if (!line.empty()) {
      if (first_data.empty()) first_data = line;
      last_data = line;
    }
  auto radius_of = [](const std::string& csv) {
    const auto c1 = csv.find(',');
    const auto c2 = csv.find(',', c1 + 1);
    return std::stod(csv.substr(c1 + 1, c2 - c1 - 1));
  };
  CHECK(radius_of(first_data) == doctest::Approx(1.0));
  CHECK(radius_of(last_data) > 1.0);

  const json fin = json::parse(slurp(dir / "final_state.json"));
  CHECK(fin.at("tool").get<std::string>() == "osmoflow");
  CHECK(fin.contains("version"));
  CHECK(fin.contains("config_hash"));
  CHECK(fin.at("status").get<std::string>() == "completed");
  CHECK(fin.at("state").at("R").get<double>() > 1.0);
}

TEST_CASE("mode-evolve is deterministic for a fixed config and seed") {
  const auto dir_a = workspace() / "me_a";
  const auto dir_b = workspace() / "me_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  fs::create_directories(dir_a);
  fs::create_directories(dir_b);

  const auto cfgfile = workspace() / "small.toml";
  spit(cfgfile,
       "[grids]\nn_inner = 65\nn_outer = 65\n"
       "[dynamics]\ndt = 0.002\nt_final = 2.0\n");

  const std::string base = "mode-evolve --k 2 --params " + cfgfile.string();
  CHECK(run(base + " --out " + dir_a.string()).exit_code == 0);
  CHECK(run(base + " --out " + dir_b.string()).exit_code == 0);

  const std::string a = slurp(dir_a / "mode_norms.csv");
  const std::string b = slurp(dir_b / "mode_norms.csv");
  CHECK(a == b);  // byte-identical output for identical config + seed
  CHECK(a.rfind("# osmoflow version=", 0) == 0);
  CHECK(a.find("t,norm") != std::string::npos);
}

TEST_CASE("spectrum subcommand writes CSV and JSON with provenance") {
  const auto dir = workspace() / "spectrum_out";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const RunResult r =
      run("spectrum --kmax 2 --n 33 --out " + dir.string());
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("k_max").get<int>() == 2);
  CHECK(j.at("n").get<int>() == 33);
  CHECK(j.contains("gap"));
  CHECK(j.contains("kernel_dimension"));

  const std::string csv = slurp(dir / "spectrum.csv");
  CHECK(csv.rfind("# osmoflow version=", 0) == 0);
  CHECK(csv.find("k,re_lambda,im_lambda") != std::string::npos);
}

TEST_CASE("verify-all honors criterion selection and failure exit codes") {
  const auto dir = workspace() / "verify";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const RunResult ok = run(
      "verify-all --only lopatinskii-determinant phi-determinant --out " +
      dir.string());
  CHECK(ok.exit_code == 0);
  const json j = json::parse(ok.out);
  CHECK(j.at("all_passed").get<bool>());
  REQUIRE(j.at("criteria").size() == 2);
  CHECK(j.at("criteria")[0].at("name").get<std::string>() ==
        "lopatinskii-determinant");
  CHECK(j.at("criteria")[0].at("passed").get<bool>());

  // the report file matches what was printed
  const json file = json::parse(slurp(dir / "verify_report.json"));
  CHECK(file.at("all_passed").get<bool>());

  // unknown criterion name is a usage error
  CHECK(run("verify-all --only bogus-name").exit_code == 2);

  // an absurd kernel tolerance makes the kernel-dimension criterion fail:
  // exit code 1, but the report is still written
  const auto strict = workspace() / "strict.toml";
  spit(strict,
       "[grids]\nn_inner = 129\nn_outer = 129\n"
       "[spectrum]\ntol_zero = 1e-30\n");
  const auto dir2 = workspace() / "verify_fail";
  fs::remove_all(dir2);
  fs::create_directories(dir2);
  const RunResult fail = run("verify-all --only kernel-dimension --params " +
                             strict.string() + " --out " + dir2.string());
  CHECK(fail.exit_code == 1);
  const json jf = json::parse(slurp(dir2 / "verify_report.json"));
  CHECK_FALSE(jf.at("all_passed").get<bool>());
}
