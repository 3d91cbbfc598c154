// gcc-ctl — command-line frontend for the Git-Context-Controller.
//
// Environment:
//   GCC_ROOT  repository root (skips upward discovery from the cwd)
//   GCC_NOW   fixed RFC 3339 timestamp for all clock reads (reproducibility)
//   GCC_VCS   "git" snapshots the workspace on each checkpoint

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "gcc/cli.hpp"

int main(int argc, char** argv) {
  gcc::cli::CliConfig config;
  config.working_dir = std::filesystem::current_path();
  config.input = &std::cin;

  if (const char* root = std::getenv("GCC_ROOT")) {
    config.root_override = std::filesystem::path(root);
  }
  if (const char* now = std::getenv("GCC_NOW")) {
    const auto parsed = gcc::parse_timestamp(now);
    if (!parsed) {
      std::cerr << "error: BadRequest: GCC_NOW must be an RFC 3339 UTC "
                   "timestamp (YYYY-MM-DDTHH:MM:SSZ)\n";
      return 2;
    }
    config.now_override = *parsed;
  }
  if (const char* vcs = std::getenv("GCC_VCS")) {
    config.vcs_git = std::string(vcs) == "git";
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  const gcc::cli::CliResult result = gcc::cli::run(args, config);
  std::cout << result.out;
  std::cerr << result.err;
  return result.exit_code;
}
