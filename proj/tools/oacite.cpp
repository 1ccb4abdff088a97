// oacite: command-line front end. Every setting can come from a key=value
// config file (--config) and be overridden by the matching --flag.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "oacite/cli.hpp"

namespace {

struct Command {
  const char* name;
  const char* help;
  int (*run)(const oacite::cli::RunConfig&, std::ostream&, std::ostream&);
};

std::string flag_for(std::string_view key) {
  std::string f = "--";
  for (char c : key) f.push_back(c == '_' ? '-' : c);
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace oacite::cli;
  static const Command commands[] = {
      {"synth", "Generate a synthetic corpus and mock web", &cmd_synth},
      {"detect", "Classify records OA/NOA with the full-text robot", &cmd_detect},
      {"analyze", "Percent OA and citation advantage tables", &cmd_analyze},
      {"cohorts", "Citation-range cohort tables", &cmd_cohorts},
      {"correlate", "Year-series correlations with significance", &cmd_correlate},
      {"audit", "Sampled audit against ground truth with d' and beta", &cmd_audit},
      {"evaluate", "detect, analyze, cohorts, correlate and audit a corpus", &cmd_evaluate},
  };
  static const std::map<std::string, std::string> booleans = {
      {"allow_unknown", "Drop UNKNOWN records instead of failing"},
      {"fetch_log", "Write fetch_log.jsonl"}};

  CLI::App app{"Open-access detection and citation-impact analysis"};
  app.require_subcommand(1);

  std::string config_path;
  bool no_robots = false;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::map<CLI::App*, const Command*> by_app;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    by_app[sub] = &cmd;
    sub->add_option("--config", config_path, "key=value configuration file");
    for (std::string_view key : kConfigKeys) {
      const std::string k(key);
      if (booleans.count(k)) {
        options.emplace_back(k, sub->add_flag(flag_for(key), flags[k], booleans.at(k)));
      } else if (k != "respect_robots") {
        options.emplace_back(k, sub->add_option(flag_for(key), values[k]));
      }
    }
    sub->add_flag("--no-robots", no_robots, "Ignore robots.txt (live mode)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) load_config_file(config, config_path);
    for (auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      apply_setting(config, key, booleans.count(key) ? "true" : values[key]);
    }
    if (no_robots) config.respect_robots = false;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }

  for (auto* sub : app.get_subcommands())
    return by_app.at(sub)->run(config, std::cout, std::cerr);
  return kConfigError;
}
