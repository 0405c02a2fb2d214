#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace translab::cli {

// configuration or validation problem; maps to process exit code 2
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GateResult {
  std::string name;
  double value = 0;
  double threshold = 0;
  std::string relation;  // "<=" or ">="
  bool pass = false;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<GateResult> gates;
  std::string report_csv;                                      // always produced
  std::vector<std::pair<std::string, std::string>> aux_files;  // name -> contents
  double seconds = 0;

  bool all_pass() const {
    for (const auto& g : gates)
      if (!g.pass) return false;
    return true;
  }
};

// throws ConfigError on parse/validation problems
void validate_config(const std::string& config_json);
ExperimentReport run_experiment(const std::string& config_json, bool plots = false, int jobs = 1);

// runs and writes report.csv (+aux) under out_dir; 0 pass, 1 gate failure
int run_experiment_to_dir(const std::string& config_json, const std::string& out_dir,
                          bool plots = false, int jobs = 1);

// canonical configuration for each named experiment
std::string default_config(const std::string& experiment);
const std::vector<std::string>& experiment_names();

// acceptance criterion id -> experiment name (each criterion maps to one experiment)
const std::map<int, std::string>& criterion_experiment_map();

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// the full battery; writes per-criterion reports under out_dir
std::vector<CriterionResult> run_acceptance_suite(const std::string& out_dir);

}  // namespace translab::cli
