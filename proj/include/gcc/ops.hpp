#pragma once

// gcc/ops.hpp — the mutating operations: OTA logging, commits, branching,
// merging, roadmap revision, and metadata updates. Every operation takes the
// repository lock for its full read-modify-write cycle and stamps exactly
// one clock reading, so a fixed clock makes whole histories reproducible
// byte for byte.
//
// MERGE, step by step (all under one lock, one timestamp):
//   (a) retrieve the target branch's context and persist it as an OTA
//       record on the current branch (observation = branch snapshot,
//       action = "MERGE <target>"),
//   (b) append a merge commit entry whose progress summary combines both
//       branches' progress,
//   (c) copy the target's log onto the current log under an origin tag
//       "== Branch <target> ==", followed by a reset tag naming the current
//       branch so later native appends keep their identity,
//   (d) optionally revise the roadmap,
//   (e) mark the target branch merged in its metadata (segment "merged",
//       keys into/at) — the branch directory is retained,
//   (f) record a checkpoint.

#include <optional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gcc/checkpoint.hpp"
#include "gcc/env.hpp"
#include "gcc/errors.hpp"
#include "gcc/fsio.hpp"
#include "gcc/model.hpp"
#include "gcc/retrieve.hpp"
#include "gcc/store.hpp"
#include "gcc/summarizer.hpp"

namespace gcc {

namespace detail {

// Free-text inputs (contributions, purposes, synthesis) are normalized to
// canonical block form: \r\n and \r become \n, edge blank lines drop.
inline std::string normalize_block(std::string_view text) {
  std::string unified;
  unified.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      unified += '\n';
    } else {
      unified += text[i];
    }
  }
  const auto v = lines::split(unified);
  return lines::join_block(v, 0, v.size());
}

inline void check_message(std::string_view message) {
  if (message.empty() || message.find('\n') != std::string_view::npos ||
      message.find('\r') != std::string_view::npos) {
    fail(ErrorCode::EmptyMessage,
         "commit message must be one nonempty line");
  }
}

inline std::int64_t next_native_seq(const std::vector<OtaRecord>& records) {
  std::int64_t highest = 0;
  for (const OtaRecord& record : records) {
    if (!record.origin && record.seq > highest) highest = record.seq;
  }
  return highest + 1;
}

// Observation text for the pre-merge auto-context record: a deterministic
// snapshot of the target branch as seen through its own view.
inline std::string branch_snapshot(const BranchView& view) {
  const auto labeled = [](const char* label, const std::string& value) {
    return value.empty() ? std::string("\n") + label
                         : std::string("\n") + label + " " + value;
  };
  std::string out = "branch: " + view.branch;
  out += labeled("purpose:", view.purpose);
  out += labeled("progress:", view.progress);
  out += "\ncommits:";
  for (const CommitSummary& c : view.commits) {
    out += "\n  " + c.id + " " + format_timestamp(c.timestamp) + " " +
           c.message;
  }
  return out;
}

}  // namespace detail

// Appends one observation/thought/action record to the current branch's log
// and returns it. Sequence numbers count native records only and restart at
// nothing: they are strictly increasing per branch.
inline OtaRecord append_ota(const RepoPaths& paths, std::string_view observation,
                            std::string_view thought, std::string_view action,
                            const Env& env) {
  return with_lock(paths, env.lock, env.clock, [&] {
    const std::string head = get_head(paths);
    const std::string text = read_log_text(paths, head);
    OtaRecord record;
    record.seq = detail::next_native_seq(read_log_records(paths, head));
    record.timestamp = env.clock();
    record.observation = detail::normalize_block(observation);
    record.thought = detail::normalize_block(thought);
    record.action = detail::normalize_block(action);
    atomic_write(paths.branch(head).log_file, text + render_ota(record));
    return record;
  });
}

struct CommitRequest {
  std::string message;
  std::string contribution;
  std::optional<Roadmap> revise_roadmap;
  std::map<std::string, MetaTree> metadata_updates;
};

// Records a milestone on the current branch: a new commit entry whose
// progress summary folds the previous entry forward, an optional roadmap
// revision, optional metadata updates, and a checkpoint.
inline CommitEntry commit(const RepoPaths& paths, const CommitRequest& request,
                          const Env& env) {
  detail::check_message(request.message);
  return with_lock(paths, env.lock, env.clock, [&] {
    const std::string head = get_head(paths);
    const BranchPaths branch = paths.branch(head);
    std::vector<CommitEntry> entries = read_commit_entries(paths, head);

    CommitEntry entry;
    entry.timestamp = env.clock();
    entry.message = request.message;
    entry.contribution = detail::normalize_block(request.contribution);
    if (entries.empty()) {
      entry.branch_purpose = "";
      entry.previous_progress = "";
      entry.id = compute_commit_id("", entry.timestamp, entry.message,
                                   entry.contribution);
    } else {
      const CommitEntry& prior = entries.back();
      entry.branch_purpose = prior.branch_purpose;
      entry.previous_progress =
          fold(prior.previous_progress, prior.contribution, env.summarizer);
      entry.id = compute_commit_id(prior.id, entry.timestamp, entry.message,
                                   entry.contribution);
    }
    entries.push_back(entry);
    atomic_write(branch.commit_file, render_commit_file(entries));

    if (request.revise_roadmap) {
      atomic_write(paths.main_file, render_roadmap(*request.revise_roadmap));
    }
    if (!request.metadata_updates.empty()) {
      MetadataDoc doc = read_metadata_doc(paths, head);
      for (const auto& [segment, tree] : request.metadata_updates) {
        doc.set(segment, tree);
      }
      atomic_write(branch.metadata_file, render_metadata(doc));
    }
    record_checkpoint(paths, entry.id, entry.message, env);
    return entry;
  });
}

// Creates a branch rooted at the current branch and switches HEAD to it.
// The new branch starts with a bootstrap commit entry holding its purpose,
// an empty log, and a copy of the parent's metadata (minus any merged flag —
// the new branch is not merged). The directory is staged and renamed into
// place so a crash cannot leave a half-made branch.
inline BranchPaths branch(const RepoPaths& paths, std::string_view name,
                          std::string_view purpose, const Env& env) {
  if (!is_valid_branch_name(name)) {
    fail(ErrorCode::InvalidName, std::string(name));
  }
  return with_lock(paths, env.lock, env.clock, [&] {
    const BranchPaths target = paths.branch(name);
    std::error_code ec;
    if (fs::exists(target.dir, ec)) {
      fail(ErrorCode::BranchExists, std::string(name));
    }
    const std::string head = get_head(paths);
    MetadataDoc doc = read_metadata_doc(paths, head);
    doc.erase("merged");

    CommitEntry bootstrap;
    bootstrap.timestamp = env.clock();
    bootstrap.message = "branch created";
    bootstrap.branch_purpose = detail::normalize_block(purpose);
    bootstrap.id =
        compute_commit_id("", bootstrap.timestamp, bootstrap.message, "");

    // '+' cannot appear in a branch name, so the stage name cannot collide
    // with a real branch.
    fs::path stage = paths.branches_dir;
    stage /= "+stage." + std::to_string(::getpid()) + "." + target.name;
    fs::remove_all(stage, ec);
    fs::create_directories(stage, ec);
    if (ec) {
      fail(ErrorCode::IoError, "cannot stage branch: " + ec.message());
    }
    atomic_write(stage / "commit.md", render_commit_file({bootstrap}));
    atomic_write(stage / "log.md", "");
    atomic_write(stage / "metadata.yaml", render_metadata(doc));
    fs::rename(stage, target.dir, ec);
    if (ec) {
      std::error_code ignore;
      fs::remove_all(stage, ignore);
      fail(ErrorCode::IoError, "cannot create branch: " + ec.message());
    }
    set_head(paths, name);
    return target;
  });
}

struct MergeRequest {
  std::string target;
  std::string synthesis;  // becomes the merge entry's contribution
  std::optional<std::string> updated_purpose;
  std::optional<Roadmap> revise_roadmap;
};

inline CommitEntry merge(const RepoPaths& paths, const MergeRequest& request,
                         const Env& env) {
  return with_lock(paths, env.lock, env.clock, [&] {
    const std::string head = get_head(paths);
    if (request.target == head) {
      fail(ErrorCode::SelfMerge, request.target);
    }
    ensure_branch(paths, request.target);
    MetadataDoc target_meta = read_metadata_doc(paths, request.target);
    if (branch_is_merged(target_meta)) {
      fail(ErrorCode::AlreadyMerged, request.target);
    }
    const UnixSeconds now = env.clock();
    const BranchPaths current = paths.branch(head);

    // (a) auto-context: fetch the target's view, persist it as an OTA record
    const BranchView target_view =
        context_branch(paths, request.target, env.summarizer);
    OtaRecord context_record;
    context_record.seq =
        detail::next_native_seq(read_log_records(paths, head));
    context_record.timestamp = now;
    context_record.observation = detail::branch_snapshot(target_view);
    context_record.thought = "pre-merge context retrieval";
    context_record.action = "MERGE " + request.target;
    atomic_write(current.log_file,
                 read_log_text(paths, head) + render_ota(context_record));

    // (b) merge commit entry on the current branch
    std::vector<CommitEntry> entries = read_commit_entries(paths, head);
    const std::vector<CommitEntry> target_entries =
        read_commit_entries(paths, request.target);
    CommitEntry entry;
    entry.timestamp = now;
    entry.message = "merge " + request.target;
    entry.contribution = detail::normalize_block(request.synthesis);
    entry.branch_purpose =
        request.updated_purpose
            ? detail::normalize_block(*request.updated_purpose)
            : (entries.empty() ? "" : entries.back().branch_purpose);
    entry.previous_progress =
        merge_summaries(latest_progress(entries, env.summarizer),
                        latest_progress(target_entries, env.summarizer),
                        env.summarizer);
    entry.id = compute_commit_id(entries.empty() ? "" : entries.back().id,
                                 entry.timestamp, entry.message,
                                 entry.contribution);
    entries.push_back(entry);
    atomic_write(current.commit_file, render_commit_file(entries));

    // (c) log fusion: target records under its origin tag, then a reset tag
    // so future native appends are not mis-attributed to the target
    const std::vector<OtaRecord> target_records =
        parse_log(read_log_text(paths, request.target));
    std::string fused = read_log_text(paths, head);
    fused += render_origin_tag(request.target);
    for (const OtaRecord& record : target_records) {
      fused += render_ota(record);
    }
    fused += render_origin_tag(head);
    atomic_write(current.log_file, fused);

    // (d) optional roadmap revision
    if (request.revise_roadmap) {
      atomic_write(paths.main_file, render_roadmap(*request.revise_roadmap));
    }

    // (e) flag the target branch as merged (directory retained)
    MetaTree merged = MetaTree::map();
    merged.set("into", MetaTree::value(head));
    merged.set("at", MetaTree::value(format_timestamp(now)));
    target_meta.set("merged", merged);
    atomic_write(paths.branch(request.target).metadata_file,
                 render_metadata(target_meta));

    // (f) checkpoint
    record_checkpoint(paths, entry.id, entry.message, env);
    return entry;
  });
}

inline void update_roadmap(const RepoPaths& paths, const Roadmap& roadmap,
                           const Env& env) {
  with_lock(paths, env.lock, env.clock, [&] {
    atomic_write(paths.main_file, render_roadmap(roadmap));
  });
}

// Replaces (or creates) one metadata segment on the current branch. A parse
// failure of the existing document propagates before anything is written.
inline void set_metadata_segment(const RepoPaths& paths,
                                 std::string_view segment, MetaTree tree,
                                 const Env& env) {
  if (!detail::is_meta_key(segment)) {
    fail(ErrorCode::BadRequest, "invalid segment name");
  }
  with_lock(paths, env.lock, env.clock, [&] {
    const std::string head = get_head(paths);
    MetadataDoc doc = read_metadata_doc(paths, head);
    doc.set(segment, std::move(tree));
    atomic_write(paths.branch(head).metadata_file, render_metadata(doc));
  });
}

}  // namespace gcc
