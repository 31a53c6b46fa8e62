#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "bogolib/config.hpp"

namespace bogolib {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitCheck = 4,
};

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
};

// Subcommands. Each writes its result under the output directory, echoes it to out and
// reports failures on err. Return values are ExitCode.
int cmd_hartree(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bogoliubov(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_manybody(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_checks(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Loads and validates the config, applies overrides and dispatches; maps exceptions to exit codes.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err);

// Hartree state from the cache keyed by the model hash, or a fresh minimization that is
// then stored. cached reports which path was taken.
HartreeState hartree_cached(const RunConfig& cfg, bool* cached = nullptr);

}  // namespace bogolib
