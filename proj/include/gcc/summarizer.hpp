#pragma once

// gcc/summarizer.hpp — progress summary folding. The default summarizer is
// deterministic and dependency-free so identical histories always produce
// identical summary bytes; an external command can be plugged in, with a
// guaranteed fallback to the default when it fails.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <string_view>

#include <unistd.h>

#include "gcc/errors.hpp"
#include "gcc/fsio.hpp"

namespace gcc {

struct SummarizerSpec {
  enum class Kind { Default, External };

  Kind kind = Kind::Default;
  std::size_t max_chars = 2000;  // values below 200 are clamped up to 200
  // External contract: the command receives <first input> NUL <second input>
  // on stdin and must print the summary to stdout and exit zero. Any failure
  // (spawn error, nonzero exit) falls back to the default summarizer and a
  // fallback marker line is appended to the result.
  std::string external_command;
};

namespace detail {

inline bool is_utf8_continuation(unsigned char c) { return (c & 0xc0) == 0x80; }

// Budget enforcement: keep the first quarter and the last 65% of the budget,
// splice with an elision marker, and back off to UTF-8 boundaries so a
// multi-byte sequence is never cut in half.
inline std::string clamp_to_budget(std::string text, std::size_t max_chars) {
  max_chars = std::max<std::size_t>(max_chars, 200);
  if (text.size() <= max_chars) return text;
  std::size_t head_end = max_chars / 4;
  while (head_end > 0 &&
         is_utf8_continuation(static_cast<unsigned char>(text[head_end]))) {
    --head_end;
  }
  std::size_t tail_begin = text.size() - (max_chars * 65) / 100;
  while (tail_begin < text.size() &&
         is_utf8_continuation(static_cast<unsigned char>(text[tail_begin]))) {
    ++tail_begin;
  }
  return text.substr(0, head_end) + "\n[... elided ...]\n" +
         text.substr(tail_begin);
}

// Runs the external command with `input` on stdin, capturing stdout.
// Returns false on any failure so the caller can fall back.
inline bool run_external(const std::string& command, const std::string& input,
                         std::string& output) {
  namespace fs = std::filesystem;
  static int counter = 0;
  fs::path input_file =
      fs::temp_directory_path() /
      ("gcc-summarizer-" + std::to_string(::getpid()) + "-" +
       std::to_string(counter++) + ".in");
  try {
    atomic_write(input_file, input);
  } catch (const Error&) {
    return false;
  }
  const std::string shell =
      command + " < " + "'" + input_file.string() + "'";
  FILE* pipe = ::popen(shell.c_str(), "r");
  if (pipe == nullptr) {
    std::error_code ec;
    fs::remove(input_file, ec);
    return false;
  }
  output.clear();
  char buffer[4096];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    output.append(buffer, n);
  }
  const int status = ::pclose(pipe);
  std::error_code ec;
  fs::remove(input_file, ec);
  return status == 0;
}

inline constexpr std::string_view kFallbackMarker =
    "[summarizer fallback: external command failed]";

inline std::string external_or_fallback(const SummarizerSpec& spec,
                                        const std::string& first,
                                        const std::string& second,
                                        std::string default_result) {
  std::string input = first;
  input += '\0';
  input += second;
  std::string output;
  if (!spec.external_command.empty() &&
      detail::run_external(spec.external_command, input, output)) {
    return clamp_to_budget(std::move(output), spec.max_chars);
  }
  if (!default_result.empty()) default_result += '\n';
  default_result += kFallbackMarker;
  return clamp_to_budget(std::move(default_result), spec.max_chars);
}

}  // namespace detail

// Folds one commit's contribution into the running progress summary.
// Default: previous and contribution joined by a "---" separator line; the
// separator is dropped when either side is empty. The result never exceeds
// the character budget.
inline std::string fold(const std::string& previous,
                        const std::string& contribution,
                        const SummarizerSpec& spec = {}) {
  std::string combined;
  if (previous.empty()) {
    combined = contribution;
  } else if (contribution.empty()) {
    combined = previous;
  } else {
    combined = previous + "\n---\n" + contribution;
  }
  if (spec.kind == SummarizerSpec::Kind::External) {
    return detail::external_or_fallback(spec, previous, contribution,
                                        std::move(combined));
  }
  return detail::clamp_to_budget(std::move(combined), spec.max_chars);
}

// Combines the current branch's progress with a merged branch's progress.
// Default: current, then a "[merged from branch]" marker line, then the
// merged summary when it is nonempty.
inline std::string merge_summaries(const std::string& current,
                                   const std::string& target,
                                   const SummarizerSpec& spec = {}) {
  std::string block = "[merged from branch]";
  if (!target.empty()) {
    block += '\n';
    block += target;
  }
  std::string combined =
      current.empty() ? block : current + "\n" + block;
  if (spec.kind == SummarizerSpec::Kind::External) {
    return detail::external_or_fallback(spec, current, target,
                                        std::move(combined));
  }
  return detail::clamp_to_budget(std::move(combined), spec.max_chars);
}

}  // namespace gcc
