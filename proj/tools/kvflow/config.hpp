#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kvflow {

// Step size policy: either proportional to the mesh (k = h^2) or explicit.
struct TimeRule {
  bool square_rule = true;  // k = h^2
  double k = 0.0;           // used when square_rule is false

  friend bool operator==(const TimeRule&, const TimeRule&) = default;
};

// One experiment description, read from a JSON document. Every field can be
// overridden by a command-line flag of the same name; flags win.
struct RunConfig {
  int example = 1;  // 1 forced vortex, 2 free polynomial vortex, 3 free sine vortex
  double nu = 1.0;
  double kappa = 1.0;
  std::vector<int> levels{4, 8, 16, 32};  // mesh divisions n, h = 1/n
  TimeRule time;
  std::optional<double> T;  // default 1, except boundedness which defaults to 10
  double picard_tol = 1e-10;
  int picard_max = 50;
  std::optional<double> alpha;  // absorbing-ball parameter, chosen automatically if unset
  std::string output_dir = ".";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parses a JSON document. Unknown keys, wrong types, or inconsistent values
// throw kv::ConfigError.
RunConfig parse_config(const std::string& json_text);

// Serializes so that parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

RunConfig load_config_file(const std::string& path);

// Structural checks shared by all commands; throws kv::ConfigError.
void validate(const RunConfig& config);

}  // namespace kvflow
