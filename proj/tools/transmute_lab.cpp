#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "translab/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw translab::cli::ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transmute-lab: numerical verification runs for the anisotropic Schrodinger operator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  bool plots = false;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "experiment configuration (JSON)")->required();
  run->add_flag("--plots", plots, "also write SVG plots");
  run->add_option("--jobs", jobs, "parallel sweep workers");
  run->add_option("--out", out_dir, "output directory");

  auto* validate = app.add_subcommand("validate", "validate a JSON config without running");
  validate->add_option("config", config_path, "experiment configuration (JSON)")->required();

  auto* suite = app.add_subcommand("suite", "run the full acceptance battery");
  suite->add_option("--out", out_dir, "output directory");

  auto* show = app.add_subcommand("default-config", "print the canonical config for an experiment");
  std::string exp_name;
  show->add_option("experiment", exp_name, "experiment name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      int code = translab::cli::run_experiment_to_dir(read_file(config_path), out_dir, plots, jobs);
      std::printf("%s: report written to %s/report.csv\n", code == 0 ? "PASS" : "FAIL", out_dir.c_str());
      return code;
    }
    if (validate->parsed()) {
      translab::cli::validate_config(read_file(config_path));
      std::printf("config ok\n");
      return 0;
    }
    if (show->parsed()) {
      std::printf("%s\n", translab::cli::default_config(exp_name).c_str());
      return 0;
    }
    if (suite->parsed()) {
      auto results = translab::cli::run_acceptance_suite(out_dir);
      bool all = true;
      for (const auto& r : results) {
        std::printf("criterion %2d [%s]: %s (%.1fs) %s\n", r.id, r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.seconds, r.pass ? "" : r.detail.c_str());
        all = all && r.pass;
      }
      std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
      return all ? 0 : 1;
    }
  } catch (const translab::cli::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
