#pragma once

// gcc/checkpoint.hpp — the checkpoint ledger and the workspace-VCS bridge.
// Every successful commit or merge appends one ledger line; when a VCS
// adapter is configured it snapshots the workspace too, but a VCS failure
// only degrades the line to "no ref" — the memory commit itself never fails
// because of the VCS.
//
// Ledger line format (tab-separated, one record per line):
//   <timestamp>\t<commit_id>\t<vcs_ref or "-">\t<message>

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcc/env.hpp"
#include "gcc/errors.hpp"
#include "gcc/fsio.hpp"
#include "gcc/model.hpp"
#include "gcc/store.hpp"
#include "gcc/time.hpp"

namespace gcc {

// Adapter interface for snapshotting the working tree alongside a memory
// commit. commit_all returns a revision identifier; it throws on failure.
struct VcsAdapter {
  virtual ~VcsAdapter() = default;
  virtual std::string commit_all(const std::string& message) = 0;
};

// Shells out to git. Failures surface as VcsError, which record_checkpoint
// downgrades to a ledger entry without a ref.
class GitVcsAdapter final : public VcsAdapter {
 public:
  explicit GitVcsAdapter(fs::path workdir) : workdir_(std::move(workdir)) {}

  std::string commit_all(const std::string& message) override {
    const std::string dir = shell_quote(workdir_.string());
    run("git -C " + dir + " add -A >/dev/null 2>&1");
    run("git -C " + dir + " commit --allow-empty -qm " +
        shell_quote(message) + " >/dev/null 2>&1");
    return capture("git -C " + dir + " rev-parse HEAD 2>/dev/null");
  }

 private:
  static std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
      if (c == '\'') out += "'\\''";
      else out += c;
    }
    out += "'";
    return out;
  }

  static void run(const std::string& command) {
    if (std::system(command.c_str()) != 0) {
      fail(ErrorCode::VcsError, "command failed: git");
    }
  }

  static std::string capture(const std::string& command) {
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) fail(ErrorCode::VcsError, "cannot run git");
    std::string out;
    char buffer[256];
    std::size_t n = 0;
    while ((n = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
      out.append(buffer, n);
    }
    if (::pclose(pipe) != 0) fail(ErrorCode::VcsError, "git rev-parse failed");
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) {
      out.pop_back();
    }
    if (out.empty()) fail(ErrorCode::VcsError, "git produced no revision id");
    return out;
  }

  fs::path workdir_;
};

struct CheckpointRecord {
  UnixSeconds timestamp = 0;
  std::string commit_id;
  std::optional<std::string> vcs_ref;
  std::string message;

  bool operator==(const CheckpointRecord&) const = default;
};

inline std::string render_checkpoint_line(const CheckpointRecord& record) {
  std::string out = format_timestamp(record.timestamp);
  out += '\t';
  out += record.commit_id;
  out += '\t';
  out += record.vcs_ref ? *record.vcs_ref : "-";
  out += '\t';
  out += record.message;
  out += '\n';
  return out;
}

inline std::vector<CheckpointRecord> parse_checkpoints(std::string_view text) {
  std::vector<CheckpointRecord> records;
  const auto v = lines::split(text);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string& line = v[i];
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    const std::size_t t3 = t2 == std::string::npos ? t2 : line.find('\t', t2 + 1);
    if (t3 == std::string::npos) {
      lines::bad_line("checkpoints.log", i, "expected four tab-separated fields");
    }
    CheckpointRecord record;
    const auto stamp = parse_timestamp(std::string_view(line).substr(0, t1));
    if (!stamp) lines::bad_line("checkpoints.log", i, "bad timestamp");
    record.timestamp = *stamp;
    record.commit_id = line.substr(t1 + 1, t2 - t1 - 1);
    if (!detail::is_hex8(record.commit_id)) {
      lines::bad_line("checkpoints.log", i, "bad commit id");
    }
    const std::string ref = line.substr(t2 + 1, t3 - t2 - 1);
    if (ref != "-") record.vcs_ref = ref;
    record.message = line.substr(t3 + 1);
    records.push_back(std::move(record));
  }
  return records;
}

inline std::vector<CheckpointRecord> list_checkpoints(const RepoPaths& paths) {
  const auto content = read_file_if_exists(paths.checkpoints_file);
  if (!content) return {};
  return parse_checkpoints(*content);
}

namespace detail {

inline bool commit_id_exists(const RepoPaths& paths, std::string_view id) {
  for (const std::string& name : list_branches(paths)) {
    const auto content = read_file_if_exists(paths.branch(name).commit_file);
    if (!content) continue;
    for (const CommitEntry& entry : parse_commit_file(*content)) {
      if (entry.id == id) return true;
    }
  }
  return false;
}

}  // namespace detail

// Appends one checkpoint for an existing commit id. Callers hold the
// repository lock (operations invoke this from inside their own locked
// section). The ledger is append-only: existing lines are never rewritten.
inline CheckpointRecord record_checkpoint(const RepoPaths& paths,
                                          const std::string& commit_id,
                                          const std::string& message,
                                          const Env& env) {
  if (!detail::commit_id_exists(paths, commit_id)) {
    fail(ErrorCode::UnknownCommit, commit_id);
  }
  CheckpointRecord record;
  record.timestamp = env.clock();
  record.commit_id = commit_id;
  record.message = message;
  if (env.vcs != nullptr) {
    try {
      record.vcs_ref = env.vcs->commit_all(message);
    } catch (const Error&) {
      record.vcs_ref = std::nullopt;  // VCS trouble never fails the commit
    }
  }
  const auto existing = read_file_if_exists(paths.checkpoints_file);
  atomic_write(paths.checkpoints_file,
               (existing ? *existing : std::string()) +
                   render_checkpoint_line(record));
  return record;
}

}  // namespace gcc
