#include "config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "kv/errors.hpp"

namespace kvflow {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& message) { throw kv::ConfigError("config: " + message); }

void expect_keys(const json& object, std::initializer_list<const char*> allowed,
                 const char* where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* name : allowed) known = known || key == name;
    if (!known) bad(std::string("unknown key \"") + key + "\" in " + where);
  }
}

double as_number(const json& value, const char* name) {
  if (!value.is_number()) bad(std::string(name) + " must be a number");
  return value.get<double>();
}

int as_integer(const json& value, const char* name) {
  if (!value.is_number_integer()) bad(std::string(name) + " must be an integer");
  return value.get<int>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("top level must be an object");
  expect_keys(doc,
              {"example", "nu", "kappa", "levels", "time", "T", "picard_tol",
               "picard_max", "alpha", "output_dir"},
              "config");

  RunConfig config;
  if (doc.contains("example")) config.example = as_integer(doc["example"], "example");
  if (doc.contains("nu")) config.nu = as_number(doc["nu"], "nu");
  if (doc.contains("kappa")) config.kappa = as_number(doc["kappa"], "kappa");
  if (doc.contains("levels")) {
    if (!doc["levels"].is_array()) bad("levels must be an array");
    config.levels.clear();
    for (const auto& entry : doc["levels"])
      config.levels.push_back(as_integer(entry, "levels entry"));
  }
  if (doc.contains("time")) {
    const json& time = doc["time"];
    if (!time.is_object()) bad("time must be an object");
    expect_keys(time, {"rule", "k"}, "time");
    if (time.contains("rule") == time.contains("k"))
      bad("time needs exactly one of \"rule\" or \"k\"");
    if (time.contains("rule")) {
      if (time["rule"] != "k=h^2") bad("the only supported time rule is \"k=h^2\"");
      config.time = TimeRule{};
    } else {
      config.time = TimeRule{false, as_number(time["k"], "time.k")};
    }
  }
  if (doc.contains("T")) config.T = as_number(doc["T"], "T");
  if (doc.contains("picard_tol"))
    config.picard_tol = as_number(doc["picard_tol"], "picard_tol");
  if (doc.contains("picard_max"))
    config.picard_max = as_integer(doc["picard_max"], "picard_max");
  if (doc.contains("alpha")) config.alpha = as_number(doc["alpha"], "alpha");
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) bad("output_dir must be a string");
    config.output_dir = doc["output_dir"].get<std::string>();
  }

  validate(config);
  return config;
}

std::string emit_config(const RunConfig& config) {
  json doc;
  doc["example"] = config.example;
  doc["nu"] = config.nu;
  doc["kappa"] = config.kappa;
  doc["levels"] = config.levels;
  if (config.time.square_rule)
    doc["time"] = {{"rule", "k=h^2"}};
  else
    doc["time"] = {{"k", config.time.k}};
  if (config.T) doc["T"] = *config.T;
  doc["picard_tol"] = config.picard_tol;
  doc["picard_max"] = config.picard_max;
  if (config.alpha) doc["alpha"] = *config.alpha;
  doc["output_dir"] = config.output_dir;
  return doc.dump(2) + "\n";
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open \"" + path + "\"");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const RunConfig& config) {
  if (config.example < 1 || config.example > 3)
    bad("example must be 1, 2, or 3");
  if (!(config.nu > 0)) bad("nu must be positive");
  if (!(config.kappa >= 0)) bad("kappa must be nonnegative");
  if (config.levels.empty()) bad("levels must not be empty");
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    if (config.levels[i] < 1) bad("levels must be positive");
    if (i > 0 && config.levels[i] <= config.levels[i - 1])
      bad("levels must be strictly increasing");
  }
  if (!config.time.square_rule && !(config.time.k > 0)) bad("time.k must be positive");
  if (config.T && !(*config.T >= 0)) bad("T must be nonnegative");
  if (!(config.picard_tol > 0)) bad("picard_tol must be positive");
  if (config.picard_max < 1) bad("picard_max must be at least 1");
  if (config.alpha && !(*config.alpha > 0)) bad("alpha must be positive");
  if (config.output_dir.empty()) bad("output_dir must not be empty");
}

}  // namespace kvflow
