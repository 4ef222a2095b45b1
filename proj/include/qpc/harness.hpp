#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "qpc/cocycle.hpp"
#include "qpc/zeros.hpp"

namespace qpc::harness {

using Json = nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kNumericRegime = 3,
  kBudget = 4,
};

struct ParamDoc {
  std::string name;
  Json default_value;
  std::string doc;
};

struct ExperimentInfo {
  std::string name;
  /// The mathematical statement the experiment probes.
  std::string anchor;
  std::string summary;
  std::vector<ParamDoc> params;
  /// Pass/fail thresholds reported under "checks" in the summary.
  std::vector<ParamDoc> tolerances;
};

const std::vector<ExperimentInfo>& catalog();
/// Throws ConfigError for unknown names.
const ExperimentInfo& experiment_info(std::string_view name);
Json catalog_json();
/// JSON Schema (draft 2020-12) of the config file.
Json config_schema();

struct ExperimentConfig {
  std::string experiment;
  /// {"type": almost_mathieu | cosine | zero | terms, ...}.
  Json potential;
  /// {"mode": sqrt2 | golden | float | rational | convergent, ...}.
  Json omega;
  /// Every catalog parameter, defaults filled in.
  Json params;
  Json tolerances;
  std::uint64_t seed = 0;
  std::string output_dir;
  int threads = 0;
  bool reproducible = false;
  ZeroBudget budget;

  /// Resolved form; parse_config(to_json()) reproduces the config.
  Json to_json() const;
  CocycleParams cocycle() const;
};

/// Minimal config for an experiment: {"experiment": name}, everything else default.
Json default_config(std::string_view experiment);

/// Validates and fills defaults. Throws ConfigError.
ExperimentConfig parse_config(const Json& raw);

/// Applies "a.b.c=value"; value is parsed as JSON, falling back to a plain
/// string. Throws ConfigError on a malformed assignment.
void apply_override(Json& config, std::string_view assignment);

/// Reads a config file. Throws ConfigError.
Json load_config_file(const std::filesystem::path& path);

/// Output directory used when neither the config nor the command line sets one.
std::string default_output_dir();

using Cell = std::variant<double, std::int64_t, std::string>;

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// RFC 4180: CRLF records, quoting when needed, doubles as %.17g.
std::string to_csv(const CsvTable& table);
std::string format_double(double v);

struct TextFile {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  Json summary = Json::object();
  std::vector<CsvTable> tables;
  std::vector<TextFile> files;
  bool budget_exhausted = false;
};

/// Runs the experiment in memory.
ExperimentOutput execute(const ExperimentConfig& config);

struct RunResult {
  int exit_code = kOk;
  std::string message;
  std::filesystem::path directory;
  Json manifest;
};

/// Executes, writes <output_dir>/<experiment>/{*.csv, *.svg, summary.json,
/// manifest.json} and maps errors to exit codes. Only non-Error exceptions
/// escape.
RunResult run(const ExperimentConfig& config);

/// Exit code for a library exception.
int exit_code_for(const std::exception& e);

std::string sha256_hex(std::string_view data);

}  // namespace qpc::harness
