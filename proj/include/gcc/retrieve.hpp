#pragma once

// gcc/retrieve.hpp — read-only context assembly: status, branch, commit,
// log, and metadata views, plus cursor pagination over commit entries and
// log lines.
//
// WINDOWING MODEL
//   Windows tile the content anchored at the end: the freshest window is
//   the last `size` items, the next window up is the `size` items before
//   that, and the oldest window holds the remainder (possibly short).
//   Window starts are therefore congruent to total mod size, so repeated
//   scroll_up visits every item exactly once. Commit windows hold 10
//   entries, log windows 20 lines.
//
//   Cursors encode (view kind, branch, window start, window size) plus a
//   fingerprint of the backing file; any append or rewrite changes the
//   fingerprint and outstanding cursors fail with StaleCursor.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcc/checkpoint.hpp"
#include "gcc/env.hpp"
#include "gcc/errors.hpp"
#include "gcc/fsio.hpp"
#include "gcc/model.hpp"
#include "gcc/sha256.hpp"
#include "gcc/store.hpp"
#include "gcc/summarizer.hpp"

namespace gcc {

inline constexpr std::size_t kCommitWindow = 10;
inline constexpr std::size_t kLogWindow = 20;

// ===========================================================================
// File readers
// ===========================================================================

inline void ensure_branch(const RepoPaths& paths, std::string_view name) {
  std::error_code ec;
  if (!is_valid_branch_name(name) ||
      !fs::is_directory(paths.branch(name).dir, ec)) {
    fail(ErrorCode::UnknownBranch, std::string(name));
  }
}

inline Roadmap read_roadmap(const RepoPaths& paths) {
  return parse_roadmap(read_file(paths.main_file));
}

inline std::vector<CommitEntry> read_commit_entries(const RepoPaths& paths,
                                                    std::string_view branch) {
  ensure_branch(paths, branch);
  const auto content = read_file_if_exists(paths.branch(branch).commit_file);
  return content ? parse_commit_file(*content) : std::vector<CommitEntry>{};
}

inline std::string read_log_text(const RepoPaths& paths,
                                 std::string_view branch) {
  ensure_branch(paths, branch);
  const auto content = read_file_if_exists(paths.branch(branch).log_file);
  return content ? *content : std::string();
}

// Records as the owning branch sees them: records whose origin tag names the
// branch itself (appended after a merge reset tag) read as native.
inline std::vector<OtaRecord> read_log_records(const RepoPaths& paths,
                                               std::string_view branch) {
  std::vector<OtaRecord> records = parse_log(read_log_text(paths, branch));
  for (OtaRecord& record : records) {
    if (record.origin && *record.origin == branch) record.origin.reset();
  }
  return records;
}

inline MetadataDoc read_metadata_doc(const RepoPaths& paths,
                                     std::string_view branch) {
  ensure_branch(paths, branch);
  const auto content = read_file_if_exists(paths.branch(branch).metadata_file);
  return content ? parse_metadata(*content) : MetaTree::map();
}

inline bool branch_is_merged(const MetadataDoc& doc) {
  return doc.find("merged") != nullptr;
}

// Progress summary as of the latest entry: its stored summary folded with
// its own contribution. Empty history means empty progress.
inline std::string latest_progress(const std::vector<CommitEntry>& entries,
                                   const SummarizerSpec& spec) {
  if (entries.empty()) return "";
  const CommitEntry& last = entries.back();
  return fold(last.previous_progress, last.contribution, spec);
}

// ===========================================================================
// Cursors
// ===========================================================================

namespace detail {

inline constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

inline std::string base64url_encode(std::string_view data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                       (static_cast<unsigned char>(data[i + 1]) << 8) |
                       static_cast<unsigned char>(data[i + 2]);
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += kBase64Alphabet[v & 63];
    i += 3;
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    const unsigned v = static_cast<unsigned char>(data[i]) << 16;
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
  } else if (rest == 2) {
    const unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                       (static_cast<unsigned char>(data[i + 1]) << 8);
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
  }
  return out;
}

inline std::optional<std::string> base64url_decode(std::string_view text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '-') return 62;
    if (c == '_') return 63;
    return -1;
  };
  if (text.size() % 4 == 1) return std::nullopt;
  std::string out;
  unsigned acc = 0;
  int bits = 0;
  for (char c : text) {
    const int v = value_of(c);
    if (v < 0) return std::nullopt;
    acc = (acc << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((acc >> bits) & 0xff);
    }
  }
  return out;
}

inline std::string file_fingerprint(std::string_view content) {
  return sha256_hex(content).substr(0, 16);
}

}  // namespace detail

struct Cursor {
  enum class View { Commits, Log };

  View view = View::Commits;
  std::string branch;
  std::size_t start = 0;
  std::size_t size = kCommitWindow;
  std::string fingerprint;

  bool operator==(const Cursor&) const = default;

  std::string token() const {
    std::string payload = view == View::Commits ? "commits" : "log";
    payload += ':';
    payload += branch;
    payload += ':';
    payload += std::to_string(start);
    payload += ':';
    payload += std::to_string(size);
    payload += ':';
    payload += fingerprint;
    return detail::base64url_encode(payload);
  }

  static Cursor decode(std::string_view token) {
    const auto payload = detail::base64url_decode(token);
    if (!payload) fail(ErrorCode::BadRequest, "invalid cursor token");
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (parts.size() < 4) {
      const std::size_t colon = payload->find(':', pos);
      if (colon == std::string::npos) {
        fail(ErrorCode::BadRequest, "invalid cursor token");
      }
      parts.push_back(payload->substr(pos, colon - pos));
      pos = colon + 1;
    }
    parts.push_back(payload->substr(pos));

    Cursor cursor;
    if (parts[0] == "commits") {
      cursor.view = View::Commits;
    } else if (parts[0] == "log") {
      cursor.view = View::Log;
    } else {
      fail(ErrorCode::BadRequest, "invalid cursor token");
    }
    cursor.branch = parts[1];
    auto parse_size = [](const std::string& text) -> std::size_t {
      if (text.empty() || text.size() > 12) {
        fail(ErrorCode::BadRequest, "invalid cursor token");
      }
      std::size_t value = 0;
      for (char c : text) {
        if (c < '0' || c > '9') {
          fail(ErrorCode::BadRequest, "invalid cursor token");
        }
        value = value * 10 + static_cast<std::size_t>(c - '0');
      }
      return value;
    };
    cursor.start = parse_size(parts[2]);
    cursor.size = parse_size(parts[3]);
    cursor.fingerprint = parts[4];
    if (!is_valid_branch_name(cursor.branch) || cursor.size == 0 ||
        cursor.fingerprint.size() != 16) {
      fail(ErrorCode::BadRequest, "invalid cursor token");
    }
    return cursor;
  }
};

// ===========================================================================
// Views
// ===========================================================================

struct BranchInfo {
  std::string name;
  bool merged = false;

  bool operator==(const BranchInfo&) const = default;
};

struct StatusSnapshot {
  std::string head;
  std::string goal;
  std::vector<Milestone> milestones;
  std::vector<BranchInfo> branches;
};

struct CommitSummary {
  std::string id;
  UnixSeconds timestamp = 0;
  std::string message;

  bool operator==(const CommitSummary&) const = default;
};

struct BranchView {
  std::string branch;
  std::string purpose;
  std::string progress;
  std::vector<CommitSummary> commits;  // newest first
  Cursor cursor;
};

struct FoundCommit {
  std::string branch;
  CommitEntry entry;
};

struct LogView {
  std::string branch;
  std::vector<std::string> lines;
  Cursor cursor;
};

struct MetadataView {
  std::string branch;
  std::string segment;
  MetaTree tree;
};

struct ScrollResult {
  Cursor::View view = Cursor::View::Commits;
  std::string branch;
  std::vector<std::string> lines;          // log view windows
  std::vector<CommitSummary> commits;      // commit view windows, newest first
  Cursor cursor;
  bool at_edge = false;
};

inline StatusSnapshot context_status(const RepoPaths& paths) {
  StatusSnapshot snapshot;
  try {
    const Roadmap roadmap = read_roadmap(paths);
    snapshot.goal = roadmap.goal;
    snapshot.milestones = roadmap.milestones;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    fail(ErrorCode::CorruptRepo, std::string("main.md unreadable: ") + e.what());
  }
  snapshot.head = get_head(paths);
  for (const std::string& name : list_branches(paths)) {
    snapshot.branches.push_back(
        {name, branch_is_merged(read_metadata_doc(paths, name))});
  }
  return snapshot;
}

namespace detail {

// Newest window over `total` items: [max(0, total-size), total).
inline std::size_t newest_window_start(std::size_t total, std::size_t size) {
  return total > size ? total - size : 0;
}

// End of the window beginning at `start`, given the end-anchored tiling.
// Starts are congruent to total mod size, so the window ends either
// size items later or at the first tile boundary.
inline std::size_t window_end(std::size_t start, std::size_t total,
                              std::size_t size) {
  if (total == 0) return 0;
  const std::size_t rem = (total - start) % size;
  return start + (rem == 0 ? size : rem);
}

inline std::vector<CommitSummary> summarize_window(
    const std::vector<CommitEntry>& entries, std::size_t first,
    std::size_t last) {
  std::vector<CommitSummary> out;
  for (std::size_t i = last; i > first; --i) {  // newest first
    const CommitEntry& e = entries[i - 1];
    out.push_back({e.id, e.timestamp, e.message});
  }
  return out;
}

}  // namespace detail

inline BranchView context_branch(const RepoPaths& paths, std::string_view name,
                                 const SummarizerSpec& spec = {}) {
  const std::vector<CommitEntry> entries = read_commit_entries(paths, name);
  const auto raw = read_file_if_exists(paths.branch(name).commit_file);

  BranchView view;
  view.branch = std::string(name);
  if (!entries.empty()) {
    view.purpose = entries.back().branch_purpose;
    view.progress = latest_progress(entries, spec);
  }
  const std::size_t start =
      detail::newest_window_start(entries.size(), kCommitWindow);
  view.commits = detail::summarize_window(entries, start, entries.size());
  view.cursor = Cursor{Cursor::View::Commits, std::string(name), start,
                       kCommitWindow,
                       detail::file_fingerprint(raw ? *raw : "")};
  return view;
}

inline FoundCommit context_commit(const RepoPaths& paths,
                                  std::string_view id_or_prefix) {
  std::vector<FoundCommit> matches;
  for (const std::string& name : list_branches(paths)) {
    for (const CommitEntry& entry : read_commit_entries(paths, name)) {
      if (entry.id == id_or_prefix) {
        matches.push_back({name, entry});
      }
    }
  }
  if (matches.empty()) {
    fail(ErrorCode::UnknownCommit, std::string(id_or_prefix));
  }
  if (matches.size() > 1) {
    fail(ErrorCode::AmbiguousCommit, std::string(id_or_prefix));
  }
  return matches.front();
}

inline LogView context_log(const RepoPaths& paths,
                           std::optional<std::string_view> branch) {
  const std::string name =
      branch ? std::string(*branch) : get_head(paths);
  const std::string text = read_log_text(paths, name);
  const auto all = lines::split(text);
  const std::size_t start = detail::newest_window_start(all.size(), kLogWindow);

  LogView view;
  view.branch = name;
  view.lines.assign(all.begin() + static_cast<std::ptrdiff_t>(start), all.end());
  view.cursor = Cursor{Cursor::View::Log, name, start, kLogWindow,
                       detail::file_fingerprint(text)};
  return view;
}

inline MetadataView context_metadata(const RepoPaths& paths,
                                     std::string_view segment,
                                     std::optional<std::string_view> branch) {
  const std::string name =
      branch ? std::string(*branch) : get_head(paths);
  const MetadataDoc doc = read_metadata_doc(paths, name);
  const MetaTree* tree = doc.find(segment);
  if (tree == nullptr) {
    fail(ErrorCode::UnknownSegment, std::string(segment));
  }
  return {name, std::string(segment), *tree};
}

enum class ScrollDirection { Up, Down };

inline ScrollResult scroll(const RepoPaths& paths, const Cursor& cursor,
                           ScrollDirection direction) {
  ensure_branch(paths, cursor.branch);
  const BranchPaths branch = paths.branch(cursor.branch);
  const fs::path& file = cursor.view == Cursor::View::Commits
                             ? branch.commit_file
                             : branch.log_file;
  const auto raw = read_file_if_exists(file);
  const std::string content = raw ? *raw : "";
  if (detail::file_fingerprint(content) != cursor.fingerprint) {
    fail(ErrorCode::StaleCursor, "content changed since the cursor was issued");
  }

  std::vector<CommitEntry> entries;
  std::vector<std::string> all_lines;
  std::size_t total = 0;
  if (cursor.view == Cursor::View::Commits) {
    entries = parse_commit_file(content);
    total = entries.size();
  } else {
    all_lines = lines::split(content);
    total = all_lines.size();
  }
  if (cursor.start > total) {
    fail(ErrorCode::BadRequest, "cursor is out of range");
  }

  // Move one window, clamping at the ends; at_edge reports that the window
  // returned is the final one in the direction of travel (the oldest window
  // for up, the newest for down), whether just reached or already pinned.
  std::size_t start = cursor.start;
  if (direction == ScrollDirection::Up) {
    start = start >= cursor.size ? start - cursor.size : 0;
  } else {
    const std::size_t current_end =
        detail::window_end(start, total, cursor.size);
    if (current_end < total) start = current_end;
  }
  const std::size_t end = detail::window_end(start, total, cursor.size);

  ScrollResult result;
  result.view = cursor.view;
  result.branch = cursor.branch;
  result.at_edge =
      direction == ScrollDirection::Up ? start == 0 : end >= total;
  if (cursor.view == Cursor::View::Commits) {
    result.commits = detail::summarize_window(entries, start, end);
  } else {
    result.lines.assign(
        all_lines.begin() + static_cast<std::ptrdiff_t>(start),
        all_lines.begin() + static_cast<std::ptrdiff_t>(end));
  }
  result.cursor = cursor;
  result.cursor.start = start;
  return result;
}

}  // namespace gcc
