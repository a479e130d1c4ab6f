// SPDX-License-Identifier: Apache-2.0
// projlab: angle, criteria and product-run reports for families of projections.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "projlab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Angle-based convergence criteria for products of projections"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  projlab::CommandOptions opts;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    return sub;
  };
  auto* angles = add("angles", "Write angles.csv with the pairwise cosines");
  angles->add_option("--out", out_dir, "Output directory");
  auto* criteria = add("criteria", "Write criteria.json and criteria.csv");
  criteria->add_option("--out", out_dir, "Output directory");
  auto* run = add("run", "Run the schedule and write trace.csv");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--svg", opts.svg, "Also write trace.svg");
  run->add_option("--jobs", opts.jobs, "Parallel workers for multi-seed sweeps")
      ->check(CLI::PositiveNumber);
  add("validate", "Check the scenario and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : projlab::kExitRuntimeError;
  }
  if (!out_dir.empty()) opts.out_dir = out_dir;
  const std::string command = app.get_subcommands().front()->get_name();
  return projlab::run_command(command, scenario, opts, std::cout, std::cerr);
}
