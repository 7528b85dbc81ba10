#ifndef SOBLAB_CONFIG_HPP
#define SOBLAB_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soblab/lab.hpp"

namespace soblab {

// Validated run configuration. Unknown keys are rejected with the offending
// field path; every exponent relation of the selected cases is checked before
// any computation starts.
struct RunConfig {
  int dimension = 2;
  double grid_h = 1.0 / 32.0;
  double grid_extent = 2.0;
  std::vector<InequalityCase> cases;
  ExperimentParams params;
  std::uint64_t seed = 1;
  std::string out_dir = "reports";
  std::string base_dir;  // directory of the config file, for relative paths

  std::optional<Measure> measure;     // defaults to the two-atom measure
  std::optional<Measure> weight;      // grid weight for weight-based cases
  struct FunctionSpec {
    std::string kind = "bump";        // bump | cone | two_bump
    Vec center = Vec::Zero(2);
    double radius = 1.0;
    double amplitude = 1.0;
  } function;

  std::vector<double> growth_R = {4.0, 8.0, 16.0, 32.0};
  std::vector<double> sharpness_x = {8, 16, 32, 64, 128, 256, 512};
  std::vector<double> sharpness_eps = {0.0, 1.0};

  GridField build_function() const;
  Measure build_measure() const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& j, const std::string& base_dir);

enum class Command { run, suite, growth, sharpness };

// Executes the command, writes CSV and/or JSON reports into out_dir
// (format: "csv", "json" or "both") and returns the process exit code:
// 0 success, 2 an asserted invariant failed, 3 configuration error.
int run_command(const RunConfig& cfg, Command cmd, const std::string& out_override,
                const std::string& format);

}  // namespace soblab

#endif
