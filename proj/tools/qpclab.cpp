// qpclab: run, list and validate experiments.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qpc/errors.hpp"
#include "qpc/harness.hpp"

namespace h = qpc::harness;

namespace {

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
};

void add_config_args(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("config", args.path, "JSON config file");
  cmd->add_option("--set", args.overrides, "override key.path=value (repeatable)");
}

h::Json load(const ConfigArgs& args) {
  h::Json raw = args.path.empty() ? h::Json::object() : h::load_config_file(args.path);
  for (const auto& o : args.overrides) h::apply_override(raw, o);
  return raw;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-periodic Schroedinger experiments"};
  app.require_subcommand(1);

  ConfigArgs run_args;
  std::string output;
  bool reproducible = false;
  std::optional<int> threads;
  auto* run = app.add_subcommand("run", "run one experiment");
  add_config_args(run, run_args);
  run->add_option("--output", output, "output directory (default: $QPC_OUTPUT_DIR or ./qpc-out)");
  run->add_flag("--reproducible", reproducible, "omit timestamps from SVG output");
  run->add_option("--threads", threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);

  bool as_json = false, schema = false;
  auto* list = app.add_subcommand("list", "list experiments and their parameters");
  list->add_flag("--json", as_json, "print the catalog as JSON");
  list->add_flag("--schema", schema, "print the config JSON schema");

  ConfigArgs val_args;
  auto* validate = app.add_subcommand("validate", "check a config and print its resolved form");
  add_config_args(validate, val_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : h::kConfig;
  }

  try {
    if (*list) {
      if (schema) {
        std::cout << h::config_schema().dump(2) << "\n";
      } else if (as_json) {
        std::cout << h::catalog_json().dump(2) << "\n";
      } else {
        for (const auto& e : h::catalog()) {
          std::cout << e.name << "\n  " << e.summary << "\n  anchor: " << e.anchor << "\n";
          for (const auto& p : e.params) std::cout << "    " << p.name << " = " << p.default_value.dump() << "  " << p.doc << "\n";
          for (const auto& p : e.tolerances)
            std::cout << "    tolerances." << p.name << " = " << p.default_value.dump() << "  " << p.doc << "\n";
        }
      }
      return h::kOk;
    }
    if (*validate) {
      const auto cfg = h::parse_config(load(val_args));
      std::cout << cfg.to_json().dump(2) << "\n";
      return h::kOk;
    }
    h::Json raw = load(run_args);
    if (!output.empty()) raw["output_dir"] = output;
    if (reproducible) raw["reproducible"] = true;
    if (threads) raw["threads"] = *threads;
    const auto cfg = h::parse_config(raw);
    const auto res = h::run(cfg);
    if (res.exit_code != h::kOk) std::cerr << "qpclab: " << res.message << "\n";
    if (!res.manifest.is_null()) std::cout << (res.directory / "manifest.json").string() << "\n";
    return res.exit_code;
  } catch (const qpc::Error& e) {
    std::cerr << "qpclab: " << e.what() << "\n";
    return h::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "qpclab: " << e.what() << "\n";
    return h::kFailure;
  }
}
