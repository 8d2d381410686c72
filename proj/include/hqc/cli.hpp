#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqc::cli {

// Malformed configuration: unknown experiment or parameter, wrong type.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ParamType { integer, real, boolean, text, integer_list, real_list, object };

std::string to_string(ParamType t);

struct ParamInfo {
  std::string name;  // snake_case; the command-line flag is the kebab-case form
  ParamType type = ParamType::real;
  nlohmann::json default_value;  // null marks a required parameter
  std::string help;

  bool required() const { return default_value.is_null(); }
  std::string flag() const;
};

// Table plus optional plot produced by one experiment.
struct Artifacts {
  std::string csv;
  std::optional<std::string> svg;
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> warnings;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<ParamInfo> params;
  std::function<Artifacts(const nlohmann::json& params)> run;
};

// Registered experiments, sorted by name.
const std::vector<ExperimentInfo>& list_experiments();
const ExperimentInfo* find_experiment(const std::string& name);
std::string registered_names();
// One block per experiment: name, description, parameters with defaults.
std::string listing();

struct ExperimentConfig {
  std::string experiment;
  nlohmann::json parameters = nlohmann::json::object();
  std::filesystem::path output;
};

// {"experiment": name, "parameters": {...}, "output": dir}; output is optional.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// Fills defaults, normalizes types and rejects unknown names. Throws ConfigError.
nlohmann::json resolve_parameters(const ExperimentInfo& info, const nlohmann::json& given);

// Converts command-line text for one parameter into JSON of the declared type.
nlohmann::json parse_flag_value(const ParamInfo& p, const std::vector<std::string>& text);

// One expectation entry evaluated against a run.
struct Check {
  std::string quantity;
  nlohmann::json value;
  nlohmann::json bounds;
  bool passed = false;
  std::string note;
};

// Entries from the built-in table whose "when" clause matches `context`.
std::vector<Check> evaluate_expectations(const std::string& experiment, const nlohmann::json& context,
                                         const nlohmann::json& results);
std::vector<Check> evaluate_expectations(const nlohmann::json& table, const std::string& experiment,
                                         const nlohmann::json& context, const nlohmann::json& results);
const nlohmann::json& builtin_expectations();

const char* build_id();

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_validation = 2,
  exit_numeric = 3,
};

struct RunOptions {
  bool check = false;  // non-zero exit when an applicable expectation fails
  bool plot = true;
  std::ostream* log = nullptr;  // progress and error messages
};

// Runs one experiment and writes results.csv, summary.json and plot.svg into
// config.output. Returns an ExitCode.
int run(const ExperimentConfig& config, const RunOptions& options = {});

// Command-line entry point used by the hqc tool.
int main_entry(int argc, char** argv);

}  // namespace hqc::cli
