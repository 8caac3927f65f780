#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gemn/harness/commands.hpp"

using namespace gemn::harness;

int main(int argc, char** argv) {
  CLI::App app{"gemn: solar mesh network simulator and intrusion-detection harness"};
  app.require_subcommand(1);
  app.fallthrough();

  CommandOptions opts;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--override", opts.overrides, "key=value applied to the scenario (repeatable)");

  auto* dce = app.add_subcommand("dce-table", "reproduce and check the planner table");

  std::string scenario;
  auto* simulate = app.add_subcommand("simulate", "run one scenario");
  simulate->add_option("scenario", scenario, "scenario JSON file")->required();

  std::vector<double> multipliers;
  std::string sweep_scenario;
  auto* sweep = app.add_subcommand("dos-sweep", "battery life of one router under DoS floods");
  sweep->add_option("--multipliers", multipliers, "attack rates as multiples of the target ASR");
  sweep->add_option("--scenario", sweep_scenario, "scenario JSON supplying battery and planner settings");

  auto* sizing = app.add_subcommand("sizing-report", "solar array sizing and battery life");

  std::string rules_path;
  auto* rules = app.add_subcommand("validate-rules", "parse a rule file");
  rules->add_option("file", rules_path, "rule file")->required();

  std::string show_scenario;
  auto* show = app.add_subcommand("show-config", "print the fully resolved scenario");
  show->add_option("scenario", show_scenario, "scenario JSON file (defaults when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (*seed_opt) opts.seed = seed;

  try {
    if (*dce) return cmd_dce_table(opts, std::cout, std::cerr);
    if (*simulate) return cmd_simulate(scenario, opts, std::cout, std::cerr);
    if (*sweep) return cmd_dos_sweep(sweep_scenario, multipliers, opts, std::cout, std::cerr);
    if (*sizing) return cmd_sizing_report(opts, std::cout, std::cerr);
    if (*rules) return cmd_validate_rules(rules_path, std::cout, std::cerr);
    if (*show) return cmd_show_config(show_scenario, opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
