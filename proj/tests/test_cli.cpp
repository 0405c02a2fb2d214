#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "translab/csvio.hpp"
#include "translab/experiment.hpp"

using namespace translab::cli;
using json = nlohmann::json;

TEST_CASE("config validation: parse errors and bad presets are rejected") {
  CHECK_THROWS_AS(validate_config("{not json"), ConfigError);
  CHECK_THROWS_AS(validate_config(R"({"experiment":"no-such-experiment"})"), ConfigError);

  json cfg = json::parse(default_config("spectrum-check"));
  cfg["metric"]["preset"] = "no-such-metric";
  CHECK_THROWS_AS(validate_config(cfg.dump()), ConfigError);

  cfg = json::parse(default_config("spectrum-check"));
  cfg["tolerances"] = {{"rel_err", -1.0}};
  CHECK_THROWS_AS(validate_config(cfg.dump()), ConfigError);

  // aliasing guard on configured probe frequency lists
  cfg = json::parse(default_config("boundary-recover"));
  cfg["grid"] = {{"dim", 1}, {"extents", {{0.0, M_PI}}}, {"nodes", {513}}};
  cfg["probe"] = {{"centers", {{1.6}}}, {"width", 0.8}, {"xi", {{1.0}}}, {"freqs", {1000.0}}};
  CHECK_THROWS_AS(validate_config(cfg.dump()), ConfigError);

  CHECK_NOTHROW(validate_config(default_config("spectrum-check")));

  // missing required keys surface as configuration errors, not runtime ones
  CHECK_THROWS_AS(run_experiment(R"({"experiment":"spectrum-check"})"), ConfigError);
}

TEST_CASE("spectrum-check runs, reports and passes") {
  auto rep = run_experiment(default_config("spectrum-check"));
  CHECK(rep.all_pass());
  CHECK(rep.report_csv.find("eigenvalue_rel_err") != std::string::npos);
  // aux CSV with per-mode rows (k, lambda_k, k^2, rel_err)
  bool found = false;
  for (const auto& [name, content] : rep.aux_files)
    if (name == "spectrum.csv") {
      found = true;
      CHECK(content.rfind("k,lambda_k,reference,rel_err", 0) == 0);
      CHECK(std::count(content.begin(), content.end(), '\n') == 11);  // header + 10 modes
    }
  CHECK(found);
}

TEST_CASE("reports are byte-identical across reruns with a fixed seed") {
  json cfg = json::parse(default_config("semigroup-check"));
  cfg["grid"]["nodes"] = {129};
  auto a = run_experiment(cfg.dump());
  auto b = run_experiment(cfg.dump());
  CHECK(a.report_csv == b.report_csv);
  REQUIRE(a.aux_files.size() == b.aux_files.size());
  for (std::size_t i = 0; i < a.aux_files.size(); ++i) CHECK(a.aux_files[i] == b.aux_files[i]);
}

TEST_CASE("gauge invariance with the identity map is exact") {
  json cfg = json::parse(default_config("gauge-invariance"));
  cfg["nodes_coarse"] = 65;
  cfg["nodes_fine"] = 129;
  cfg["diffeo"]["preset"] = "identity";
  auto rep = run_experiment(cfg.dump());
  for (const auto& g : rep.gates)
    if (g.name.rfind("identity_map_", 0) == 0) {
      CHECK(g.pass);
      CHECK(g.value <= 1e-12);
    }
}

TEST_CASE("eigendecomposition cache honors TRANSMUTE_LAB_CACHE") {
  std::string dir = "./translab_cache_env_test";
  setenv("TRANSMUTE_LAB_CACHE", dir.c_str(), 1);
  json cfg = json::parse(default_config("spectrum-check"));
  cfg["grid"]["nodes"] = {65};
  auto a = run_experiment(cfg.dump());
  bool have_file = false;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".bin") have_file = true;
  CHECK(have_file);
  auto b = run_experiment(cfg.dump());  // served from the cache
  CHECK(a.report_csv == b.report_csv);
  unsetenv("TRANSMUTE_LAB_CACHE");
  std::filesystem::remove_all(dir);
}

TEST_CASE("every acceptance criterion maps to exactly one known experiment") {
  const auto& m = criterion_experiment_map();
  CHECK(m.size() == 12);
  const auto& names = experiment_names();
  for (int id = 1; id <= 12; ++id) {
    REQUIRE(m.count(id) == 1);
    CHECK(std::find(names.begin(), names.end(), m.at(id)) != names.end());
  }
}

TEST_CASE("matrix and trace CSV formats") {
  double m[4] = {1.0, 2.0, 3.0, 4.0};  // column-major 2x2
  std::string mc = matrix_csv(m, 2, 2);
  CHECK(mc.rfind("row,col,value\n0,0,1", 0) == 0);
  CHECK(std::count(mc.begin(), mc.end(), '\n') == 5);

  std::string tc = trace_csv("exp1", {0.0, 0.5}, {3, 7}, m);
  CHECK(tc.rfind("experiment_id,t,node_index,value\n", 0) == 0);
  CHECK(tc.find("exp1,0.5,3,3") != std::string::npos);
}

TEST_CASE("parallel sweeps reproduce the single-worker report") {
  auto a = run_experiment(default_config("boundary-recover"), false, 1);
  auto b = run_experiment(default_config("boundary-recover"), false, 2);
  CHECK(a.report_csv == b.report_csv);
}

TEST_CASE("run_experiment_to_dir writes the report and returns the gate status") {
  std::string dir = "./translab_cli_test_out";
  json cfg = json::parse(default_config("semigroup-check"));
  cfg["grid"]["nodes"] = {65};
  int code = run_experiment_to_dir(cfg.dump(), dir);
  CHECK(code == 0);
  std::ifstream is(dir + "/report.csv");
  REQUIRE(is.good());
  std::string header;
  std::getline(is, header);
  CHECK(header == "experiment,gate,value,relation,threshold,pass");
  std::filesystem::remove_all(dir);
}
