#pragma once

// gcc/replay.hpp — deterministic replay of operation scripts and the
// cross-session handoff check.
//
// SCRIPT FORMAT (line-delimited JSON)
//   line 1  header: {"version": 1, "fresh": bool, "clock": ["<rfc3339>", …]}
//   line 2+ steps:  {"op": "<name>", "args": {…}, "expect": {…}?}
//
// Each mutating step (init, ota, commit, branch, merge, set_metadata,
// update_roadmap) consumes the next clock timestamp; every timestamp the
// step stamps internally uses that one value. Read-only steps consume
// nothing. The clock list must be long enough and nondecreasing.
//
// expect is an optional assertion: {"ok": bool}, {"error_code": "<Code>"},
// and/or {"data_subset": {…}} — data_subset must be contained in the
// response's data (object keys recursively; arrays and scalars compare
// exactly). Failures are collected, not thrown.
//
// The state digest is SHA-256 over every file under .GCC/ (sorted relative
// paths, each contributing path, size, and raw bytes), printed as lowercase
// hex. Two repositories with equal digests hold byte-identical memory.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gcc/dispatch.hpp"
#include "gcc/env.hpp"
#include "gcc/errors.hpp"
#include "gcc/json_views.hpp"
#include "gcc/sha256.hpp"
#include "gcc/store.hpp"
#include "gcc/time.hpp"

namespace gcc {

inline bool is_mutating_op(std::string_view op) {
  return op == "init" || op == "ota" || op == "commit" || op == "branch" ||
         op == "merge" || op == "set_metadata" || op == "update_roadmap";
}

struct ReplayStep {
  std::string op;
  Json args = Json::object();
  std::optional<Json> expect;
};

struct ReplayScript {
  bool fresh = true;
  std::vector<UnixSeconds> clock;
  std::vector<ReplayStep> steps;

  std::size_t mutating_count() const {
    std::size_t count = 0;
    for (const ReplayStep& step : steps) {
      if (is_mutating_op(step.op)) ++count;
    }
    return count;
  }
};

struct StepFailure {
  std::size_t index = 0;
  std::string reason;
};

struct ReplayResult {
  std::vector<Json> transcript;  // one response object per step
  std::string digest;
  std::vector<StepFailure> failures;
};

namespace detail {

[[noreturn]] inline void script_error(std::size_t line_no,
                                      const std::string& what) {
  fail(ErrorCode::ScriptError,
       "script line " + std::to_string(line_no) + ": " + what);
}

inline Json parse_script_line(const std::string& line, std::size_t line_no) {
  const Json parsed = Json::parse(line, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    script_error(line_no, "not a JSON object");
  }
  return parsed;
}

}  // namespace detail

inline ReplayScript parse_script(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  ReplayScript script;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const Json parsed = detail::parse_script_line(line, line_no);
    if (!header_seen) {
      header_seen = true;
      if (!parsed.contains("version") || parsed["version"] != 1) {
        detail::script_error(line_no, "unsupported script version");
      }
      if (!parsed.contains("fresh") || !parsed["fresh"].is_boolean()) {
        detail::script_error(line_no, "header needs a boolean 'fresh'");
      }
      script.fresh = parsed["fresh"].get<bool>();
      if (parsed.contains("clock")) {
        if (!parsed["clock"].is_array()) {
          detail::script_error(line_no, "clock must be an array");
        }
        for (const Json& stamp : parsed["clock"]) {
          if (!stamp.is_string()) {
            detail::script_error(line_no, "clock entries must be strings");
          }
          const auto value = parse_timestamp(stamp.get<std::string>());
          if (!value) {
            detail::script_error(line_no, "bad clock timestamp");
          }
          script.clock.push_back(*value);
        }
      }
      continue;
    }
    ReplayStep step;
    if (!parsed.contains("op") || !parsed["op"].is_string()) {
      detail::script_error(line_no, "step needs a string 'op'");
    }
    step.op = parsed["op"].get<std::string>();
    if (parsed.contains("args")) {
      if (!parsed["args"].is_object()) {
        detail::script_error(line_no, "step args must be an object");
      }
      step.args = parsed["args"];
    }
    if (parsed.contains("expect")) {
      if (!parsed["expect"].is_object()) {
        detail::script_error(line_no, "expect must be an object");
      }
      step.expect = parsed["expect"];
    }
    script.steps.push_back(std::move(step));
  }
  if (!header_seen) {
    fail(ErrorCode::ScriptError, "script is empty (missing header)");
  }
  if (script.steps.empty()) {
    fail(ErrorCode::ScriptError, "script has no steps");
  }
  const std::size_t needed = script.mutating_count();
  if (script.clock.size() < needed) {
    fail(ErrorCode::ScriptError,
         "clock has " + std::to_string(script.clock.size()) +
             " timestamps but the script has " + std::to_string(needed) +
             " mutating steps");
  }
  for (std::size_t i = 1; i < script.clock.size(); ++i) {
    if (script.clock[i] < script.clock[i - 1]) {
      fail(ErrorCode::ScriptError, "clock timestamps must be nondecreasing");
    }
  }
  return script;
}

inline ReplayScript parse_script_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_script(in);
}

// SHA-256 over the full .GCC tree: sorted relative paths, each file
// contributing "<path>\n<size>\n<bytes>".
inline std::string digest_tree(const fs::path& gcc_dir) {
  std::error_code ec;
  std::vector<fs::path> files;
  if (fs::is_directory(gcc_dir, ec)) {
    for (const auto& entry : fs::recursive_directory_iterator(gcc_dir, ec)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
  }
  std::vector<std::string> relative;
  relative.reserve(files.size());
  for (const fs::path& file : files) {
    relative.push_back(fs::relative(file, gcc_dir).generic_string());
  }
  std::sort(relative.begin(), relative.end());
  Sha256 hash;
  for (const std::string& rel : relative) {
    const std::string content = read_file(gcc_dir / rel);
    hash.update(rel);
    hash.update("\n", 1);
    hash.update(std::to_string(content.size()));
    hash.update("\n", 1);
    hash.update(content);
  }
  const auto digest = hash.finish();
  return to_hex(digest.data(), digest.size());
}

namespace detail {

// Subset containment: objects require every expected key to match
// recursively; arrays and scalars must compare equal.
inline bool json_subset(const Json& expected, const Json& actual) {
  if (expected.is_object()) {
    if (!actual.is_object()) return false;
    for (const auto& [key, value] : expected.items()) {
      if (!actual.contains(key)) return false;
      if (!json_subset(value, actual[key])) return false;
    }
    return true;
  }
  return expected == actual;
}

inline void check_expectation(const ReplayStep& step, std::size_t index,
                              const Json& response,
                              std::vector<StepFailure>& failures) {
  if (!step.expect) return;
  const Json& expect = *step.expect;
  if (expect.contains("ok")) {
    if (!expect["ok"].is_boolean()) {
      failures.push_back({index, "expect.ok must be a boolean"});
    } else if (response["ok"] != expect["ok"]) {
      failures.push_back(
          {index, "expected ok=" + expect["ok"].dump() + ", got " +
                      response["ok"].dump()});
    }
  }
  if (expect.contains("error_code")) {
    const Json actual = response.contains("error")
                            ? Json(response["error"].value("code", ""))
                            : Json("");
    if (actual != expect["error_code"]) {
      failures.push_back({index, "expected error_code=" +
                                     expect["error_code"].dump() + ", got " +
                                     actual.dump()});
    }
  }
  if (expect.contains("data_subset")) {
    if (!response.contains("data") ||
        !json_subset(expect["data_subset"], response["data"])) {
      failures.push_back({index, "data does not contain expected subset"});
    }
  }
}

}  // namespace detail

// Executes a script against `root`. Each step becomes one transcript entry
// shaped exactly like a tool-server response with the step index as id.
inline ReplayResult run_script(const ReplayScript& script, const fs::path& root,
                               const Env& base_env = {}) {
  {
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create root: " + root.string());
    const bool has_repo = fs::is_directory(root / ".GCC", ec);
    if (script.fresh && has_repo) {
      fail(ErrorCode::ScriptError,
           "script expects a fresh root but .GCC already exists");
    }
    if (!script.fresh && !has_repo) {
      fail(ErrorCode::ScriptError,
           "script expects an existing repository but found none");
    }
  }
  ReplayResult result;
  std::size_t clock_index = 0;
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const ReplayStep& step = script.steps[i];
    Env env = base_env;
    if (is_mutating_op(step.op)) {
      env.clock = fixed_clock(script.clock[clock_index++]);
    }
    Json response;
    try {
      const Json data = dispatch_op(root, step.op, step.args, env);
      response = Json{{"id", i}, {"ok", true}, {"data", data}};
    } catch (const Error& e) {
      response = Json{{"id", i},
                      {"ok", false},
                      {"error", Json{{"code", code_name(e.code())},
                                     {"message", e.what()}}}};
    }
    detail::check_expectation(step, i, response, result.failures);
    result.transcript.push_back(std::move(response));
  }
  result.digest = digest_tree(root / ".GCC");
  return result;
}

struct HandoffReport {
  std::string full_digest;      // one uninterrupted run
  std::string resumed_digest;   // run split across two sessions
  bool equal = false;
  std::vector<StepFailure> failures;  // expectation failures from either run
};

// Splits `script` at `split` (0 < split < steps), runs the prefix on a fresh
// root, abandons that session entirely, reopens the repository cold, runs
// the suffix, and compares the final digest against an uninterrupted run on
// a second root. Equal digests prove the handoff lost nothing.
inline HandoffReport handoff_check(const ReplayScript& script,
                                   std::size_t split, const fs::path& root_full,
                                   const fs::path& root_resumed,
                                   const Env& base_env = {}) {
  if (split == 0 || split >= script.steps.size()) {
    fail(ErrorCode::ScriptError, "split must fall strictly inside the script");
  }
  ReplayScript first;
  first.fresh = script.fresh;
  first.steps.assign(script.steps.begin(),
                     script.steps.begin() + static_cast<std::ptrdiff_t>(split));
  // The prefix gets exactly the timestamps it consumes; the suffix gets the
  // rest, so both sessions together read the same clock as the full run.
  std::size_t consumed = 0;
  for (const ReplayStep& step : first.steps) {
    if (is_mutating_op(step.op)) ++consumed;
  }
  first.clock.assign(script.clock.begin(),
                     script.clock.begin() + static_cast<std::ptrdiff_t>(consumed));

  ReplayScript second;
  second.fresh = false;
  second.steps.assign(script.steps.begin() + static_cast<std::ptrdiff_t>(split),
                      script.steps.end());
  second.clock.assign(script.clock.begin() + static_cast<std::ptrdiff_t>(consumed),
                      script.clock.end());

  HandoffReport report;
  const ReplayResult full = run_script(script, root_full, base_env);
  report.full_digest = full.digest;
  report.failures = full.failures;

  const ReplayResult part_one = run_script(first, root_resumed, base_env);
  for (const StepFailure& failure : part_one.failures) {
    report.failures.push_back(failure);
  }
  // Session boundary: nothing survives in memory. The second run starts
  // from the files alone.
  const ReplayResult part_two = run_script(second, root_resumed, base_env);
  for (StepFailure failure : part_two.failures) {
    failure.index += split;
    report.failures.push_back(failure);
  }
  report.resumed_digest = part_two.digest;
  report.equal = report.full_digest == report.resumed_digest;
  return report;
}

}  // namespace gcc
