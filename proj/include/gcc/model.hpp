#pragma once

// gcc/model.hpp — the four on-disk text formats and their canonical
// parse/render pairs, plus commit-id derivation. Everything here is pure:
// no filesystem, no clock.
//
// CANONICAL-FORM CONTRACT
//   For every format, render always emits canonical text and
//   parse(render(value)) == value for every value in the canonical domain.
//   Rendered files use \n line endings exclusively and end with a final
//   newline (or are empty). Parsers are strict: they accept canonical text
//   plus harmless blank-line padding between top-level items, and raise
//   ParseError with a line number for anything else.
//
// Format summaries (details at each parse/render pair below):
//   roadmap   main.md      "# Project Roadmap" / "## Goal" / "## Milestones"
//                          checkbox list / optional "## Notes" free text.
//   commits   commit.md    "# COMMIT <id> | <timestamp> | <message>" headers,
//                          each followed by exactly three "## " blocks.
//   log       log.md       "=== OTA <seq> <timestamp> ===" records with
//                          [O]/[T]/[A] fields, 4-space continuation lines,
//                          and "== Branch <name> ==" origin tags.
//   metadata  metadata.yaml strict 2-space-indented YAML subset: maps, lists
//                          of scalars, double-quoted escapes.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gcc/errors.hpp"
#include "gcc/sha256.hpp"
#include "gcc/time.hpp"

namespace gcc {

// ===========================================================================
// Shared line helpers
// ===========================================================================

namespace lines {

// Splits on '\n'. A trailing newline does not produce a final empty element:
// "a\nb\n" -> {"a","b"}, "a\n\n" -> {"a",""}, "" -> {}.
inline std::vector<std::string> split(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.emplace_back(text.substr(pos));
      break;
    }
    out.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += '\n';
    out += v[i];
  }
  return out;
}

// Joins a line range into a block, dropping empty lines at both edges.
// Canonical block values therefore never start or end with an empty line;
// interior empty lines are preserved.
inline std::string join_block(const std::vector<std::string>& v,
                              std::size_t first, std::size_t last) {
  while (first < last && v[first].empty()) ++first;
  while (last > first && v[last - 1].empty()) --last;
  std::string out;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) out += '\n';
    out += v[i];
  }
  return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

[[noreturn]] inline void bad_line(std::string_view file, std::size_t index,
                                  const std::string& what) {
  fail(ErrorCode::ParseError,
       std::string(file) + ":" + std::to_string(index + 1) + ": " + what);
}

}  // namespace lines

// ===========================================================================
// Roadmap (main.md)
// ===========================================================================
//
// # Project Roadmap
//
// ## Goal
// <free text>
//
// ## Milestones
// - [ ] open item
// - [x] done item
//
// ## Notes                       (section omitted when notes are empty)
// <free text>
//
// Goal and notes are free multi-line text, trimmed of leading/trailing empty
// lines; they must not contain a line equal to one of the section headers.
// Unknown trailing sections survive a round trip inside notes verbatim.

struct Milestone {
  std::string text;
  bool done = false;

  bool operator==(const Milestone&) const = default;
};

struct Roadmap {
  std::string goal;
  std::vector<Milestone> milestones;
  std::string notes;

  bool operator==(const Roadmap&) const = default;
};

inline std::string render_roadmap(const Roadmap& roadmap) {
  std::string out = "# Project Roadmap\n\n## Goal\n";
  if (!roadmap.goal.empty()) {
    out += roadmap.goal;
    out += '\n';
  }
  out += "\n## Milestones\n";
  for (const Milestone& m : roadmap.milestones) {
    out += m.done ? "- [x] " : "- [ ] ";
    out += m.text;
    out += '\n';
  }
  if (!roadmap.notes.empty()) {
    out += "\n## Notes\n";
    out += roadmap.notes;
    out += '\n';
  }
  return out;
}

inline Roadmap parse_roadmap(std::string_view text) {
  const auto v = lines::split(text);
  if (v.empty() || v[0] != "# Project Roadmap") {
    lines::bad_line("main.md", 0, "expected '# Project Roadmap' header");
  }
  std::size_t i = 1;
  while (i < v.size() && v[i].empty()) ++i;
  if (i >= v.size() || v[i] != "## Goal") {
    lines::bad_line("main.md", i, "expected '## Goal' section");
  }
  ++i;
  const std::size_t goal_first = i;
  while (i < v.size() && v[i] != "## Milestones" && v[i] != "## Notes") ++i;
  Roadmap roadmap;
  roadmap.goal = lines::join_block(v, goal_first, i);

  if (i < v.size() && v[i] == "## Milestones") {
    ++i;
    for (;;) {
      while (i < v.size() && v[i].empty()) ++i;
      if (i >= v.size()) break;
      const std::string& line = v[i];
      if (lines::starts_with(line, "- [ ] ") || line == "- [ ]") {
        roadmap.milestones.push_back(
            {line.size() > 6 ? line.substr(6) : "", false});
      } else if (lines::starts_with(line, "- [x] ") || line == "- [x]") {
        roadmap.milestones.push_back(
            {line.size() > 6 ? line.substr(6) : "", true});
      } else {
        break;
      }
      ++i;
    }
  }

  if (i < v.size()) {
    std::size_t notes_first = i;
    if (v[i] == "## Notes") notes_first = i + 1;
    roadmap.notes = lines::join_block(v, notes_first, v.size());
  }
  return roadmap;
}

// ===========================================================================
// Commit entries (commit.md)
// ===========================================================================
//
// # COMMIT <id> | <timestamp> | <message>
// ## Branch Purpose
// <block>
// ## Previous Progress Summary
// <block>
// ## This Commit Contribution
// <block>
//
// Entries are separated by one blank line. The id is 8 lowercase hex chars,
// the timestamp RFC 3339 UTC, the message a single line (it may contain
// " | "; the first two separators bind to id and timestamp). Blocks are free
// text trimmed of edge blank lines; a block must not contain one of the
// three heading lines or a line starting with "# COMMIT ".

struct CommitEntry {
  std::string id;
  UnixSeconds timestamp = 0;
  std::string message;
  std::string branch_purpose;
  std::string previous_progress;
  std::string contribution;

  bool operator==(const CommitEntry&) const = default;
};

inline constexpr std::string_view kPurposeHeading = "## Branch Purpose";
inline constexpr std::string_view kProgressHeading =
    "## Previous Progress Summary";
inline constexpr std::string_view kContributionHeading =
    "## This Commit Contribution";

inline std::string render_commit_entry(const CommitEntry& entry) {
  std::string out = "# COMMIT ";
  out += entry.id;
  out += " | ";
  out += format_timestamp(entry.timestamp);
  out += " | ";
  out += entry.message;
  out += '\n';
  auto block = [&out](std::string_view heading, const std::string& text) {
    out += heading;
    out += '\n';
    if (!text.empty()) {
      out += text;
      out += '\n';
    }
  };
  block(kPurposeHeading, entry.branch_purpose);
  block(kProgressHeading, entry.previous_progress);
  block(kContributionHeading, entry.contribution);
  return out;
}

inline std::string render_commit_file(const std::vector<CommitEntry>& entries) {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += '\n';
    out += render_commit_entry(entries[i]);
  }
  return out;
}

namespace detail {

inline bool is_hex8(std::string_view s) {
  if (s.size() != 8) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

inline bool is_commit_boundary(const std::string& line) {
  return lines::starts_with(line, "# COMMIT ") || line == kPurposeHeading ||
         line == kProgressHeading || line == kContributionHeading;
}

}  // namespace detail

inline std::vector<CommitEntry> parse_commit_file(std::string_view text) {
  const auto v = lines::split(text);
  std::vector<CommitEntry> entries;
  std::size_t i = 0;
  while (true) {
    while (i < v.size() && v[i].empty()) ++i;
    if (i >= v.size()) break;
    if (!lines::starts_with(v[i], "# COMMIT ")) {
      lines::bad_line("commit.md", i, "expected '# COMMIT' entry header");
    }
    const std::string_view header = std::string_view(v[i]).substr(9);
    const std::size_t sep1 = header.find(" | ");
    const std::size_t sep2 =
        sep1 == std::string_view::npos ? sep1 : header.find(" | ", sep1 + 3);
    if (sep1 == std::string_view::npos || sep2 == std::string_view::npos) {
      lines::bad_line("commit.md", i,
                      "entry header needs '<id> | <timestamp> | <message>'");
    }
    CommitEntry entry;
    entry.id = std::string(header.substr(0, sep1));
    const std::string_view stamp = header.substr(sep1 + 3, sep2 - sep1 - 3);
    entry.message = std::string(header.substr(sep2 + 3));
    if (!detail::is_hex8(entry.id)) {
      lines::bad_line("commit.md", i, "commit id must be 8 lowercase hex");
    }
    const auto parsed = parse_timestamp(stamp);
    if (!parsed) {
      lines::bad_line("commit.md", i, "bad timestamp in entry header");
    }
    entry.timestamp = *parsed;
    ++i;

    auto read_block = [&](std::string_view heading) -> std::string {
      if (i >= v.size() || v[i] != heading) {
        lines::bad_line("commit.md", i >= v.size() ? v.size() - 1 : i,
                        "expected '" + std::string(heading) + "'");
      }
      ++i;
      const std::size_t first = i;
      while (i < v.size() && !detail::is_commit_boundary(v[i])) ++i;
      return lines::join_block(v, first, i);
    };
    entry.branch_purpose = read_block(kPurposeHeading);
    entry.previous_progress = read_block(kProgressHeading);
    entry.contribution = read_block(kContributionHeading);
    entries.push_back(std::move(entry));
  }
  return entries;
}

// ===========================================================================
// OTA log (log.md)
// ===========================================================================
//
// === OTA <seq> <timestamp> ===
// [O] first observation line
//     continuation line (exactly four leading spaces are stripped)
// [T] thought
// [A] action
// == Branch <name> ==
//
// Fields appear in O, T, A order, once each. An empty field renders as the
// bare marker "[O]". Field text is otherwise unrestricted \n-joined text:
// every line after the first is prefixed with four spaces, so arbitrary
// content (including lines resembling headers) survives a round trip.
// An origin tag assigns every following record to that branch; records
// before any tag are native (origin not set). Tags cannot revert to
// "no origin", so canonical record lists are native-first, then tagged.

struct OtaRecord {
  std::int64_t seq = 0;
  UnixSeconds timestamp = 0;
  std::string observation;
  std::string thought;
  std::string action;
  std::optional<std::string> origin;

  bool operator==(const OtaRecord&) const = default;
};

inline std::string render_origin_tag(std::string_view branch) {
  std::string out = "== Branch ";
  out += branch;
  out += " ==\n";
  return out;
}

inline std::string render_ota(const OtaRecord& record) {
  std::string out = "=== OTA ";
  out += std::to_string(record.seq);
  out += ' ';
  out += format_timestamp(record.timestamp);
  out += " ===\n";
  auto field = [&out](char marker, const std::string& text) {
    if (text.empty()) {
      out += '[';
      out += marker;
      out += "]\n";
      return;
    }
    const auto parts = lines::split(text + "\n");
    out += '[';
    out += marker;
    out += "] ";
    out += parts[0];
    out += '\n';
    for (std::size_t i = 1; i < parts.size(); ++i) {
      out += "    ";
      out += parts[i];
      out += '\n';
    }
  };
  field('O', record.observation);
  field('T', record.thought);
  field('A', record.action);
  return out;
}

// Renders a full record list, emitting an origin tag whenever the origin
// changes. The list must be canonical: once a record carries an origin,
// every following record must carry one too.
inline std::string render_log(const std::vector<OtaRecord>& records) {
  std::string out;
  std::optional<std::string> current;
  for (const OtaRecord& record : records) {
    if (record.origin != current) {
      if (!record.origin.has_value()) {
        fail(ErrorCode::ParseError,
             "log.md: native records cannot follow tagged records");
      }
      out += render_origin_tag(*record.origin);
      current = record.origin;
    }
    out += render_ota(record);
  }
  return out;
}

// Name of the origin tag that is active at end-of-file, if any. Appends
// after this point inherit that tag.
inline std::optional<std::string> log_tail_origin(std::string_view text) {
  std::optional<std::string> current;
  for (const auto& line : lines::split(text)) {
    if (lines::starts_with(line, "== Branch ") &&
        lines::ends_with(line, " ==") && line.size() > 13) {
      current = line.substr(10, line.size() - 13);
    }
  }
  return current;
}

inline std::vector<OtaRecord> parse_log(std::string_view text) {
  const auto v = lines::split(text);
  std::vector<OtaRecord> records;
  std::optional<std::string> origin;
  bool open = false;         // a record header has been seen
  int fields_seen = 0;       // 0..3 fields started in the open record
  OtaRecord current;
  std::string* field = nullptr;

  auto close_record = [&](std::size_t index) {
    if (!open) return;
    if (fields_seen != 3) {
      lines::bad_line("log.md", index == 0 ? 0 : index - 1,
                      "record must contain [O], [T], and [A] fields");
    }
    records.push_back(current);
    open = false;
    fields_seen = 0;
    field = nullptr;
  };

  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string& line = v[i];
    if (lines::starts_with(line, "=== OTA ") && lines::ends_with(line, " ===")) {
      close_record(i);
      const std::string_view middle =
          std::string_view(line).substr(8, line.size() - 12);
      const std::size_t space = middle.find(' ');
      if (space == std::string_view::npos) {
        lines::bad_line("log.md", i, "record header needs '<seq> <timestamp>'");
      }
      const std::string_view seq_text = middle.substr(0, space);
      std::int64_t seq = 0;
      if (seq_text.empty() || seq_text.size() > 18) {
        lines::bad_line("log.md", i, "bad sequence number");
      }
      for (char c : seq_text) {
        if (c < '0' || c > '9') {
          lines::bad_line("log.md", i, "bad sequence number");
        }
        seq = seq * 10 + (c - '0');
      }
      const auto stamp = parse_timestamp(middle.substr(space + 1));
      if (!stamp) lines::bad_line("log.md", i, "bad timestamp in record header");
      current = OtaRecord{};
      current.seq = seq;
      current.timestamp = *stamp;
      current.origin = origin;
      open = true;
      continue;
    }
    if (lines::starts_with(line, "== Branch ") &&
        lines::ends_with(line, " ==")) {
      if (line.size() <= 13) {
        lines::bad_line("log.md", i, "origin tag needs a branch name");
      }
      close_record(i);
      origin = line.substr(10, line.size() - 13);
      continue;
    }
    if (!open) {
      lines::bad_line("log.md", i, "expected '=== OTA' record header");
    }
    if (line == "[O]" || lines::starts_with(line, "[O] ")) {
      if (fields_seen != 0) {
        lines::bad_line("log.md", i, "fields must appear in [O] [T] [A] order");
      }
      current.observation = line.size() > 3 ? line.substr(4) : "";
      field = &current.observation;
      fields_seen = 1;
      continue;
    }
    if (line == "[T]" || lines::starts_with(line, "[T] ")) {
      if (fields_seen != 1) {
        lines::bad_line("log.md", i, "fields must appear in [O] [T] [A] order");
      }
      current.thought = line.size() > 3 ? line.substr(4) : "";
      field = &current.thought;
      fields_seen = 2;
      continue;
    }
    if (line == "[A]" || lines::starts_with(line, "[A] ")) {
      if (fields_seen != 2) {
        lines::bad_line("log.md", i, "fields must appear in [O] [T] [A] order");
      }
      current.action = line.size() > 3 ? line.substr(4) : "";
      field = &current.action;
      fields_seen = 3;
      continue;
    }
    if (lines::starts_with(line, "    ") && field != nullptr) {
      *field += '\n';
      *field += line.substr(4);
      continue;
    }
    lines::bad_line("log.md", i, "malformed record line");
  }
  close_record(v.size());
  return records;
}

// ===========================================================================
// Metadata (metadata.yaml)
// ===========================================================================
//
// segment:
//   key: scalar
//   list_key:
//     - item
//   empty_map: {}
//   empty_list: []
//   nested:
//     inner: "quoted: scalar"
//
// Strict subset of YAML: two-space indentation per level, ordered maps with
// keys matching [A-Za-z0-9_.-]+, lists whose elements are scalars, and
// scalars that are either raw text to end-of-line or a double-quoted string
// with \\ \" \n \t escapes. Empty containers render inline as {} / [].
// A key with neither an inline value nor children is a parse error, as are
// duplicate keys, tabs in indentation, and odd indents.

struct MetaTree {
  enum class Kind { Scalar, List, Map };

  Kind kind = Kind::Map;
  std::string scalar;                                   // Kind::Scalar
  std::vector<MetaTree> items;                          // Kind::List
  std::vector<std::pair<std::string, MetaTree>> entries;  // Kind::Map

  bool operator==(const MetaTree&) const = default;

  static MetaTree value(std::string text) {
    MetaTree t;
    t.kind = Kind::Scalar;
    t.scalar = std::move(text);
    return t;
  }
  static MetaTree list(std::vector<MetaTree> items = {}) {
    MetaTree t;
    t.kind = Kind::List;
    t.items = std::move(items);
    return t;
  }
  static MetaTree map(std::vector<std::pair<std::string, MetaTree>> e = {}) {
    MetaTree t;
    t.kind = Kind::Map;
    t.entries = std::move(e);
    return t;
  }

  const MetaTree* find(std::string_view key) const {
    for (const auto& [k, child] : entries) {
      if (k == key) return &child;
    }
    return nullptr;
  }

  void set(std::string_view key, MetaTree child) {
    for (auto& [k, existing] : entries) {
      if (k == key) {
        existing = std::move(child);
        return;
      }
    }
    entries.emplace_back(std::string(key), std::move(child));
  }

  void erase(std::string_view key) {
    for (auto it = entries.begin(); it != entries.end(); ++it) {
      if (it->first == key) {
        entries.erase(it);
        return;
      }
    }
  }
};

// A metadata document is one top-level map: segment name -> tree.
using MetadataDoc = MetaTree;

namespace detail {

inline bool is_meta_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

inline bool scalar_needs_quoting(std::string_view s) {
  if (s.empty() || s == "{}" || s == "[]") return true;
  if (s.front() == ' ' || s.back() == ' ' || s.front() == '"') return true;
  for (char c : s) {
    if (static_cast<unsigned char>(c) < 0x20) return true;
  }
  return false;
}

inline std::string render_scalar(std::string_view s) {
  if (!scalar_needs_quoting(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          fail(ErrorCode::ParseError,
               "metadata scalar contains an unsupported control character");
        }
        out += c;
    }
  }
  out += '"';
  return out;
}

inline std::string parse_scalar(std::string_view token, std::size_t index) {
  if (token.empty() || token.front() != '"') {
    if (token == "{}" || token == "[]") {
      // handled by the caller; reaching here means a bug
      lines::bad_line("metadata.yaml", index, "unexpected container marker");
    }
    return std::string(token);
  }
  std::string out;
  std::size_t i = 1;
  while (i < token.size()) {
    const char c = token[i];
    if (c == '"') {
      if (i + 1 != token.size()) {
        lines::bad_line("metadata.yaml", index,
                        "trailing text after closing quote");
      }
      return out;
    }
    if (c == '\\') {
      if (i + 1 >= token.size()) {
        lines::bad_line("metadata.yaml", index, "dangling escape");
      }
      const char e = token[i + 1];
      if (e == '\\') out += '\\';
      else if (e == '"') out += '"';
      else if (e == 'n') out += '\n';
      else if (e == 't') out += '\t';
      else lines::bad_line("metadata.yaml", index, "unknown escape sequence");
      i += 2;
      continue;
    }
    out += c;
    ++i;
  }
  lines::bad_line("metadata.yaml", index, "unterminated quoted scalar");
}

inline void render_meta_entries(const MetaTree& map, std::size_t depth,
                                std::string& out);

inline void render_meta_value(const std::string& key, const MetaTree& value,
                              std::size_t depth, std::string& out) {
  const std::string pad(depth * 2, ' ');
  switch (value.kind) {
    case MetaTree::Kind::Scalar:
      out += pad + key + ": " + render_scalar(value.scalar) + "\n";
      return;
    case MetaTree::Kind::List:
      if (value.items.empty()) {
        out += pad + key + ": []\n";
        return;
      }
      out += pad + key + ":\n";
      for (const MetaTree& item : value.items) {
        if (item.kind != MetaTree::Kind::Scalar) {
          fail(ErrorCode::ParseError,
               "metadata list elements must be scalars");
        }
        out += pad + "  - " + render_scalar(item.scalar) + "\n";
      }
      return;
    case MetaTree::Kind::Map:
      if (value.entries.empty()) {
        out += pad + key + ": {}\n";
        return;
      }
      out += pad + key + ":\n";
      render_meta_entries(value, depth + 1, out);
      return;
  }
}

inline void render_meta_entries(const MetaTree& map, std::size_t depth,
                                std::string& out) {
  for (const auto& [key, value] : map.entries) {
    render_meta_value(key, value, depth, out);
  }
}

inline std::size_t meta_indent(const std::string& line, std::size_t index) {
  std::size_t n = 0;
  while (n < line.size() && line[n] == ' ') ++n;
  if (n < line.size() && line[n] == '\t') {
    lines::bad_line("metadata.yaml", index, "tabs are not allowed in indentation");
  }
  return n;
}

inline MetaTree parse_meta_map(const std::vector<std::string>& v,
                               std::size_t& i, std::size_t depth);

inline MetaTree parse_meta_list(const std::vector<std::string>& v,
                                std::size_t& i, std::size_t depth) {
  MetaTree list = MetaTree::list();
  const std::size_t want = depth * 2;
  while (i < v.size()) {
    const std::size_t indent = meta_indent(v[i], i);
    if (indent < want) break;
    if (indent > want) {
      lines::bad_line("metadata.yaml", i, "unexpected indentation");
    }
    const std::string_view rest = std::string_view(v[i]).substr(want);
    if (!lines::starts_with(rest, "- ")) {
      if (rest == "-") {
        lines::bad_line("metadata.yaml", i, "list item needs a scalar value");
      }
      break;  // a map key at this level ends the list (caller rejects mixes)
    }
    list.items.push_back(MetaTree::value(parse_scalar(rest.substr(2), i)));
    ++i;
  }
  return list;
}

inline MetaTree parse_meta_map(const std::vector<std::string>& v,
                               std::size_t& i, std::size_t depth) {
  MetaTree map = MetaTree::map();
  const std::size_t want = depth * 2;
  while (i < v.size()) {
    const std::string& line = v[i];
    if (line.empty()) {
      lines::bad_line("metadata.yaml", i, "blank lines are not allowed");
    }
    const std::size_t indent = meta_indent(line, i);
    if (indent < want) break;
    if (indent > want) {
      lines::bad_line("metadata.yaml", i, "unexpected indentation");
    }
    const std::string_view rest = std::string_view(line).substr(want);
    if (lines::starts_with(rest, "- ") || rest == "-") {
      lines::bad_line("metadata.yaml", i, "list item outside a list");
    }
    const std::size_t colon = rest.find(':');
    if (colon == std::string_view::npos) {
      lines::bad_line("metadata.yaml", i, "expected 'key: value'");
    }
    const std::string key(rest.substr(0, colon));
    if (!is_meta_key(key)) {
      lines::bad_line("metadata.yaml", i, "bad key '" + key + "'");
    }
    if (map.find(key) != nullptr) {
      lines::bad_line("metadata.yaml", i, "duplicate key '" + key + "'");
    }
    const std::string_view after = rest.substr(colon + 1);
    ++i;
    if (after.empty()) {
      // Complex value: children must sit exactly one level deeper.
      if (i >= v.size()) {
        lines::bad_line("metadata.yaml", i - 1,
                        "key has no value (use {} or [] for empty)");
      }
      const std::size_t child_indent = meta_indent(v[i], i);
      if (child_indent != want + 2) {
        lines::bad_line("metadata.yaml", i - 1,
                        "key has no value (use {} or [] for empty)");
      }
      const std::string_view child =
          std::string_view(v[i]).substr(child_indent);
      if (lines::starts_with(child, "- ") || child == "-") {
        map.set(key, parse_meta_list(v, i, depth + 1));
      } else {
        map.set(key, parse_meta_map(v, i, depth + 1));
      }
      continue;
    }
    if (after.front() != ' ') {
      lines::bad_line("metadata.yaml", i - 1, "expected a space after ':'");
    }
    const std::string_view token = after.substr(1);
    if (token == "{}") {
      map.set(key, MetaTree::map());
    } else if (token == "[]") {
      map.set(key, MetaTree::list());
    } else {
      map.set(key, MetaTree::value(parse_scalar(token, i - 1)));
    }
  }
  return map;
}

}  // namespace detail

inline std::string render_metadata(const MetadataDoc& doc) {
  std::string out;
  detail::render_meta_entries(doc, 0, out);
  return out;
}

inline MetadataDoc parse_metadata(std::string_view text) {
  const auto v = lines::split(text);
  std::size_t i = 0;
  MetadataDoc doc = detail::parse_meta_map(v, i, 0);
  if (i != v.size()) {
    lines::bad_line("metadata.yaml", i, "unexpected content");
  }
  return doc;
}

// ===========================================================================
// Commit ids
// ===========================================================================

// Deterministic content hash: SHA-256 over parent id, timestamp, message,
// and contribution (NUL-separated), truncated to 8 lowercase hex characters.
// The first commit of a branch uses an empty parent id.
inline std::string compute_commit_id(std::string_view parent_id,
                                     UnixSeconds timestamp,
                                     std::string_view message,
                                     std::string_view contribution) {
  Sha256 hash;
  hash.update(parent_id);
  hash.update("\0", 1);
  hash.update(format_timestamp(timestamp));
  hash.update("\0", 1);
  hash.update(message);
  hash.update("\0", 1);
  hash.update(contribution);
  const auto digest = hash.finish();
  return to_hex(digest.data(), digest.size()).substr(0, 8);
}

}  // namespace gcc
