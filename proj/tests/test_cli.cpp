#include <doctest.h>

#include <cstdlib>
#include <random>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "../tools/cli.hpp"
#include "hwm/io.hpp"

namespace fs = std::filesystem;
using hwm::io::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hwm_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const json& j) {
  std::ofstream f(path);
  f << j.dump(2);
}

json read(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  json j;
  f >> j;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json schema(const std::string& name) {
  return read(std::string(HWMLAB_SOURCE_DIR) + "/data/schemas/" + name + ".schema.json");
}

int run(std::initializer_list<std::string> args) { return hwm::cli::run(args); }

json targets_doc() {
  return json{{"targets", {{"w", {-0.5, 0.5}}, {"epsilon", 0.01}, {"spacing", 1200.0}}}};
}

}  // namespace

TEST_CASE("construct: outputs, schema validity, determinism") {
  TempDir tmp;
  write(tmp / "targets.json", targets_doc());
  REQUIRE(run({"construct", "--config", tmp / "targets.json", "--out", tmp / "out"}) == 0);

  const json cfg = read(tmp / "out/configuration.json");
  const json rep = read(tmp / "out/build_report.json");
  CHECK_NOTHROW(hwm::io::validate_schema(cfg, schema("configuration")));
  CHECK_NOTHROW(hwm::io::validate_schema(rep, schema("build_report")));
  CHECK(rep["residual_history"].back().get<double>() <= 1e-10);

  // byte-identical outputs on a second run
  const std::string first = slurp(tmp / "out/configuration.json");
  REQUIRE(run({"construct", "--config", tmp / "targets.json", "--out", tmp / "out2"}) == 0);
  CHECK(first == slurp(tmp / "out2/configuration.json"));

  // configuration round-trips through the parser
  CHECK_NOTHROW((void)hwm::io::configuration_from_json(cfg));
}

TEST_CASE("construct: schema violations exit 1, unit speed rejected") {
  TempDir tmp;
  json bad = targets_doc();
  bad["unknown_key"] = 1;
  write(tmp / "bad.json", bad);
  CHECK(run({"construct", "--config", tmp / "bad.json", "--out", tmp / "out"}) == 1);

  json unit = targets_doc();
  unit["targets"]["w"] = {1.0, 0.3};
  write(tmp / "unit.json", unit);
  CHECK(run({"construct", "--config", tmp / "unit.json", "--out", tmp / "out"}) == 1);

  json mystery = targets_doc();
  mystery["targets"]["speed_list"] = {0.5};
  write(tmp / "mystery.json", mystery);
  CHECK(run({"construct", "--config", tmp / "mystery.json", "--out", tmp / "out"}) == 1);
}

TEST_CASE("simulate: csv + monitor, exit 3 on collision") {
  TempDir tmp;
  write(tmp / "targets.json", targets_doc());
  REQUIRE(run({"construct", "--config", tmp / "targets.json", "--out", tmp / "c"}) == 0);

  json sim;
  sim["configuration"] = read(tmp / "c/configuration.json");
  sim["trajectory"] = {{"t_begin", 0.0}, {"t_end", 10.0}, {"sample_stride", 1.0}};
  write(tmp / "sim.json", sim);
  REQUIRE(run({"simulate", "--config", tmp / "sim.json", "--out", tmp / "s"}) == 0);

  const json monitor = read(tmp / "s/monitor.json");
  CHECK_NOTHROW(hwm::io::validate_schema(monitor, schema("monitor")));
  CHECK(monitor["max_constraint_residual"].get<double>() <= 1e-8);
  CHECK(monitor["status"] == "Completed");

  const std::string csv = slurp(tmp / "s/trajectory.csv");
  CHECK(csv.substr(0, 2) == "t,");
  CHECK(csv.find("\r\n") != std::string::npos);
  CHECK(csv.find("nan") == std::string::npos);
  CHECK(csv.find("inf") == std::string::npos);
  // 11 samples + header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);

  // a three-soliton run driven backward into its interaction epoch dips in
  // Im(x); a raised floor turns that into a dynamical-event exit
  json n3;
  n3["targets"] = {{"w", {-0.6, 0.0, 0.6}}, {"epsilon", 0.01}, {"spacing", 1500.0}};
  write(tmp / "t3.json", n3);
  REQUIRE(run({"construct", "--config", tmp / "t3.json", "--out", tmp / "c3"}) == 0);
  json dip;
  dip["configuration"] = read(tmp / "c3/configuration.json");
  dip["trajectory"] = {{"t_begin", 0.0},       {"t_end", -1600.0}, {"sample_stride", 50.0},
                       {"max_step", 25.0},     {"im_floor", 2.0},  {"rel_tol", 1e-10}};
  write(tmp / "dip.json", dip);
  CHECK(run({"simulate", "--config", tmp / "dip.json", "--out", tmp / "x"}) == 3);
  CHECK(fs::exists(tmp / "x/trajectory.csv"));
  CHECK(read(tmp / "x/monitor.json")["status"] == "ImaginaryFloor");
}

TEST_CASE("analyze: full report for a constructed pair") {
  TempDir tmp;
  write(tmp / "targets.json", targets_doc());
  REQUIRE(run({"construct", "--config", tmp / "targets.json", "--out", tmp / "c"}) == 0);

  json an;
  an["configuration"] = read(tmp / "c/configuration.json");
  an["analysis"] = {{"gap_tol", 1e-9},
                    {"trajectory", {{"t_begin", 0.0}, {"t_end", 20.0}, {"sample_stride", 2.0}}}};
  write(tmp / "an.json", an);
  REQUIRE(run({"analyze", "--config", tmp / "an.json", "--out", tmp / "a"}) == 0);

  const json rep = read(tmp / "a/report.json");
  CHECK_NOTHROW(hwm::io::validate_schema(rep, schema("report")));
  CHECK(rep["alpha"]["alpha"].get<double>() > 0.0);
  CHECK_FALSE(rep["witness"].is_null());
  CHECK(rep["bounds"]["all_ok"].get<bool>());
  CHECK_FALSE(rep["asymptotics"].is_null());
  CHECK(rep["traveling"]["verdict"] == "NotTraveling");
  CHECK(rep.contains("convergence"));
  CHECK(rep["sign"].get<double>() == -1.0);
}

TEST_CASE("analyze: equal speeds give a singular-spectrum flag, exit 0") {
  TempDir tmp;
  json an;
  an["configuration"] = {
      {"m0", {0.0, 0.0, 1.0}},
      {"spins", json::array({json::array({{1.25, 0}, {0, 1.25}, {0, 0}}),
                             json::array({{0.75, 1.0}, {-1.0, 0.75}, {0, 0}})})},
      {"poles", json::array({{-3.0, 1.3}, {3.0, 2.1}})}};
  an["analysis"] = {{"gap_tol", 1e-9}, {"traveling", true}};
  write(tmp / "an.json", an);
  REQUIRE(run({"analyze", "--config", tmp / "an.json", "--out", tmp / "a"}) == 0);
  const json rep = read(tmp / "a/report.json");
  CHECK(rep["singular_spectrum"].get<bool>());
  CHECK(rep["asymptotics"].is_null());
  CHECK(rep["traveling"]["verdict"] == "Traveling");
}

TEST_CASE("construct: exit 2 when the fixpoint cannot converge") {
  TempDir tmp;
  json doc = targets_doc();
  doc["max_iter"] = 0;  // forbid iterations so the residual never reaches tol
  write(tmp / "t.json", doc);
  CHECK(run({"construct", "--config", tmp / "t.json", "--out", tmp / "out"}) == 2);
}

TEST_CASE("verify: suites pass, negative control trips, bad suite exits 1") {
  TempDir tmp;
  CHECK(run({"verify", "pauli", "--seed", "7", "--out", tmp / "v"}) == 0);
  const json summary = read(tmp / "v/verify.json");
  CHECK_NOTHROW(hwm::io::validate_schema(summary, schema("verify")));
  CHECK(summary["ok"].get<bool>());

  CHECK(run({"verify", "cauchy"}) == 0);
  CHECK(run({"verify", "negative-control", "--seed", "3"}) == 0);
  CHECK(run({"verify", "no-such-suite"}) == 1);
}
