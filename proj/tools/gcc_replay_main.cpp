// gcc-replay — deterministic script replay and handoff checking.
//
//   gcc-replay run --script FILE --root DIR [--transcript]
//       Executes the script against DIR and prints the final state digest.
//       --transcript also prints one response line per step.
//
//   gcc-replay handoff --script FILE --split N --root-a DIR1 --root-b DIR2
//       Runs the script end-to-end on DIR1, then as two cold sessions split
//       at step N on DIR2, and compares digests.
//
// Exit codes: 0 success (and digests equal for handoff), 1 expectation
// failures or digest mismatch or domain error, 2 usage error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gcc/replay.hpp"

namespace {

gcc::ReplayScript load_script(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    gcc::fail(gcc::ErrorCode::IoError, "cannot read script: " + path);
  }
  return gcc::parse_script(in);
}

void print_failures(const std::vector<gcc::StepFailure>& failures) {
  for (const gcc::StepFailure& failure : failures) {
    std::cerr << "step " << failure.index << ": " << failure.reason << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic replay for Git-Context-Controller repositories",
               "gcc-replay"};
  app.require_subcommand(1);

  auto* cmd_run = app.add_subcommand("run", "execute a script");
  std::string script_path, root;
  bool transcript = false;
  cmd_run->add_option("--script", script_path, "script file")->required();
  cmd_run->add_option("--root", root, "repository root")->required();
  cmd_run->add_flag("--transcript", transcript, "print per-step responses");

  auto* cmd_handoff =
      app.add_subcommand("handoff", "verify a split run matches a full run");
  std::string handoff_script, root_a, root_b;
  std::size_t split = 0;
  cmd_handoff->add_option("--script", handoff_script, "script file")->required();
  cmd_handoff->add_option("--split", split, "step index to split at")->required();
  cmd_handoff->add_option("--root-a", root_a, "root for the full run")->required();
  cmd_handoff->add_option("--root-b", root_b, "root for the split run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd_run->parsed()) {
      const gcc::ReplayScript script = load_script(script_path);
      const gcc::ReplayResult result = gcc::run_script(script, root);
      if (transcript) {
        for (const gcc::Json& response : result.transcript) {
          std::cout << response.dump(-1, ' ', false,
                                     gcc::Json::error_handler_t::replace)
                    << "\n";
        }
      }
      std::cout << "digest " << result.digest << "\n";
      if (!result.failures.empty()) {
        print_failures(result.failures);
        return 1;
      }
      return 0;
    }

    const gcc::ReplayScript script = load_script(handoff_script);
    const gcc::HandoffReport report =
        gcc::handoff_check(script, split, root_a, root_b);
    std::cout << "full    " << report.full_digest << "\n";
    std::cout << "resumed " << report.resumed_digest << "\n";
    std::cout << (report.equal ? "equal" : "MISMATCH") << "\n";
    if (!report.failures.empty()) print_failures(report.failures);
    return report.equal && report.failures.empty() ? 0 : 1;
  } catch (const gcc::Error& e) {
    std::cerr << "error: " << gcc::code_name(e.code()) << ": " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: IoError: " << e.what() << "\n";
    return 1;
  }
}
