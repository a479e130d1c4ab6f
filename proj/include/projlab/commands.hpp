// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "projlab/scenario.hpp"

namespace projlab {

// Process exit codes shared by every command.
enum ExitCode : int {
  kExitPass = 0,
  kExitRuntimeError = 1,
  kExitCriteriaFail = 2,  // failed hypothesis, envelope violation, incompatible pair
  kExitDivergence = 3,
};

struct CommandOptions {
  std::optional<std::string> out_dir;  // overrides the scenario's output.dir
  bool svg = false;
  std::size_t jobs = 1;
};

// Each command writes its files, prints a short summary to `out`, and returns
// an ExitCode. Errors escape as exceptions; run_command maps them to codes.
int cmd_angles(const Scenario& s, const CommandOptions& opts, std::ostream& out);
int cmd_criteria(const Scenario& s, const CommandOptions& opts, std::ostream& out);
int cmd_run(const Scenario& s, const CommandOptions& opts, std::ostream& out);
int cmd_validate(const Scenario& s, std::ostream& out);

// Loads the scenario and dispatches; exceptions become messages on `err` and
// the matching exit code.
int run_command(const std::string& command, const std::string& scenario_path,
                const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace projlab
