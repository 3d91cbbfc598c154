// gcc-toolserver — line-delimited JSON server over stdio. One request per
// line on stdin, one response per line on stdout, always in order. Intended
// to sit behind an agent framework's tool-call loop.
//
// Environment: GCC_ROOT, GCC_NOW, GCC_VCS (see gcc-ctl).

#include <cstdlib>
#include <iostream>
#include <string>

#include "gcc/toolserver.hpp"

int main() {
  std::filesystem::path root = std::filesystem::current_path();
  if (const char* env_root = std::getenv("GCC_ROOT")) {
    root = env_root;
  } else {
    // Walk upward to an enclosing repository; stay at the cwd when there is
    // none so an init request can create one here.
    std::filesystem::path probe = root;
    for (;;) {
      std::error_code ec;
      if (std::filesystem::is_directory(probe / ".GCC", ec)) {
        root = probe;
        break;
      }
      const std::filesystem::path parent = probe.parent_path();
      if (parent == probe) break;
      probe = parent;
    }
  }

  gcc::Env env;
  if (const char* now = std::getenv("GCC_NOW")) {
    const auto parsed = gcc::parse_timestamp(now);
    if (!parsed) {
      std::cerr << "error: BadRequest: GCC_NOW must be an RFC 3339 UTC "
                   "timestamp (YYYY-MM-DDTHH:MM:SSZ)\n";
      return 2;
    }
    env.clock = gcc::fixed_clock(*parsed);
  }
  gcc::GitVcsAdapter git_adapter{root};
  if (const char* vcs = std::getenv("GCC_VCS")) {
    if (std::string(vcs) == "git") env.vcs = &git_adapter;
  }

  std::ios::sync_with_stdio(false);
  gcc::serve(root, std::cin, std::cout, env);
  return 0;
}
