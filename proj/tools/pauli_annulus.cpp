#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "pauli_annulus/commands.hpp"
#include "pauli_annulus/config.hpp"
#include "pauli_annulus/version.hpp"

namespace pa = pauli_annulus;

namespace {

unsigned threads_from_env() {
  const char* env = std::getenv("PAULI_ANNULUS_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const long v = std::stol(env, &used);
    if (used == std::string(env).size() && v > 0) return static_cast<unsigned>(v);
  } catch (const std::exception&) {
  }
  std::cerr << "warning: ignoring PAULI_ANNULUS_THREADS='" << env << "' (expected a positive integer)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-lying Dirichlet-Pauli spectrum on a radial annulus"};
  app.set_version_flag("--version", std::string(pa::kSoftwareName) + " " + pa::kSoftwareVersion);

  std::string command;
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  app.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember(pa::command_names()));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output.directory)");
  app.add_option("--threads", threads, "Worker threads (default: PAULI_ANNULUS_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pa::exit_code::usage;
  }

  if (threads == 0) threads = threads_from_env();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  pa::RunOptions options;
  options.threads = threads;
  if (!out_dir.empty()) options.out_dir = out_dir;

  try {
    const auto cfg = pa::parse_config(config_path);
    return pa::run(command, cfg, options, std::cerr);
  } catch (...) {
    return pa::exit_code_for_current_exception(std::cerr);
  }
}
