// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: `linesol <soliton|spectrum|reduce|branch|verify>`.
// Flags override a `--config` key=value file; every file written carries the
// config hash in its name and, for JSON, in its content.
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "linesol/io.hpp"

namespace linesol {

struct ParsedCommand {
  std::string subcommand;
  RunConfig config;
  bool help = false;   // help was printed, nothing to run
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitAcceptance = 3;   // verify ran but a criterion failed

/// Parses argv with CLI11 (help text goes to `out`). Throws ValidationError
/// for unparsable input; does not run validate().
ParsedCommand parse_command_line(const std::vector<std::string>& args, std::ostream& out);

/// Runs a validated subcommand, writing artifacts under config.out. Returns
/// the exit code; numerical failures propagate as exceptions.
int run_subcommand(const std::string& subcommand, const RunConfig& config, std::ostream& out,
                   std::vector<std::string>* outputs = nullptr);

/// Whole program: parse, validate, run, manifest, structured errors on `err`.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linesol
