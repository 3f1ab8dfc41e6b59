#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pauli_annulus/config.hpp"

namespace pauli_annulus {

struct RunOptions {
  /// Overrides output.directory from the config.
  std::optional<std::filesystem::path> out_dir;
  unsigned threads = 1;
};

/// potential, fiber, asymptotics, spectrum, ab-sweep, converge, selftest
const std::vector<std::string>& command_names();

/// Runs one command and writes its files. Throws on any failure; a failing
/// selftest throws InternalError after its CSV has been written.
void execute(const std::string& command, const RunConfig& cfg, const RunOptions& options);

/// execute() with failures mapped to process exit codes; messages go to err.
int run(const std::string& command, const RunConfig& cfg, const RunOptions& options, std::ostream& err);

/// Exit code for the exception currently being handled.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace pauli_annulus
