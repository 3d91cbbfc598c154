#pragma once

// gcc/dispatch.hpp — the single operation table behind both the CLI and the
// tool server. Requests arrive as (op name, JSON args); results leave as
// JSON. Argument problems raise BadRequest, unknown operation names raise
// UnknownOp, and domain failures keep their library error codes, so both
// frontends expose identical semantics by construction.
//
// Operations: init, ota, commit, branch, merge, context, scroll,
// checkpoints, set_metadata, update_roadmap. This set is closed — notably
// there is no branch-switch operation; HEAD moves only when a branch is
// created or via the library API.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcc/env.hpp"
#include "gcc/errors.hpp"
#include "gcc/json_views.hpp"
#include "gcc/ops.hpp"
#include "gcc/retrieve.hpp"
#include "gcc/store.hpp"

namespace gcc {

namespace detail {

inline const Json* find_arg(const Json& args, std::string_view key) {
  const auto it = args.find(std::string(key));
  if (it == args.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::string need_string(const Json& args, std::string_view key) {
  const Json* value = find_arg(args, key);
  if (value == nullptr || !value->is_string()) {
    fail(ErrorCode::BadRequest,
         "args." + std::string(key) + " must be a string");
  }
  return value->get<std::string>();
}

inline std::string opt_string(const Json& args, std::string_view key,
                              std::string fallback = "") {
  const Json* value = find_arg(args, key);
  if (value == nullptr) return fallback;
  if (!value->is_string()) {
    fail(ErrorCode::BadRequest,
         "args." + std::string(key) + " must be a string");
  }
  return value->get<std::string>();
}

inline bool opt_flag(const Json& args, std::string_view key) {
  const Json* value = find_arg(args, key);
  if (value == nullptr) return false;
  if (!value->is_boolean()) {
    fail(ErrorCode::BadRequest,
         "args." + std::string(key) + " must be a boolean");
  }
  return value->get<bool>();
}

inline std::vector<std::string> opt_string_list(const Json& args,
                                                std::string_view key) {
  const Json* value = find_arg(args, key);
  if (value == nullptr) return {};
  if (!value->is_array()) {
    fail(ErrorCode::BadRequest,
         "args." + std::string(key) + " must be an array of strings");
  }
  std::vector<std::string> out;
  for (const Json& item : *value) {
    if (!item.is_string()) {
      fail(ErrorCode::BadRequest,
           "args." + std::string(key) + " must be an array of strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

inline Roadmap roadmap_from_json(const Json& value) {
  if (!value.is_object()) {
    fail(ErrorCode::BadRequest, "roadmap must be an object");
  }
  Roadmap roadmap;
  roadmap.goal = opt_string(value, "goal");
  roadmap.notes = opt_string(value, "notes");
  if (const Json* milestones = find_arg(value, "milestones")) {
    if (!milestones->is_array()) {
      fail(ErrorCode::BadRequest, "roadmap.milestones must be an array");
    }
    for (const Json& item : *milestones) {
      if (!item.is_object()) {
        fail(ErrorCode::BadRequest,
             "roadmap.milestones entries must be objects");
      }
      Milestone milestone;
      milestone.text = need_string(item, "text");
      milestone.done = opt_flag(item, "done");
      if (milestone.text.find('\n') != std::string::npos) {
        fail(ErrorCode::BadRequest, "milestone text must be one line");
      }
      roadmap.milestones.push_back(std::move(milestone));
    }
  }
  return roadmap;
}

inline Json dispatch_context(const RepoPaths& paths, const Json& args,
                             const Env& env) {
  const Json* commit_arg = find_arg(args, "commit");
  const Json* branch_arg = find_arg(args, "branch");
  const Json* metadata_arg = find_arg(args, "metadata");
  const bool log_mode = opt_flag(args, "log");

  const int modes = (commit_arg != nullptr ? 1 : 0) + (log_mode ? 1 : 0) +
                    (metadata_arg != nullptr ? 1 : 0);
  if (modes > 1) {
    fail(ErrorCode::BadRequest,
         "choose one of commit, log, or metadata context modes");
  }
  if (commit_arg != nullptr) {
    if (branch_arg != nullptr) {
      fail(ErrorCode::BadRequest, "commit lookup does not take a branch");
    }
    const FoundCommit found =
        context_commit(paths, need_string(args, "commit"));
    return Json{{"branch", found.branch}, {"entry", entry_to_json(found.entry)}};
  }
  std::optional<std::string> branch;
  if (branch_arg != nullptr) branch = need_string(args, "branch");
  if (log_mode) {
    return log_view_to_json(context_log(
        paths, branch ? std::optional<std::string_view>(*branch)
                      : std::nullopt));
  }
  if (metadata_arg != nullptr) {
    const MetadataView view = context_metadata(
        paths, need_string(args, "metadata"),
        branch ? std::optional<std::string_view>(*branch) : std::nullopt);
    return Json{{"branch", view.branch},
                {"segment", view.segment},
                {"tree", tree_to_json(view.tree)}};
  }
  if (branch) {
    return branch_view_to_json(context_branch(paths, *branch, env.summarizer));
  }
  return status_to_json(context_status(paths));
}

}  // namespace detail

inline Json dispatch_op(const fs::path& root, std::string_view op,
                        const Json& args, const Env& env) {
  if (!args.is_object()) {
    fail(ErrorCode::BadRequest, "args must be an object");
  }

  if (op == "init") {
    init_repo(root, detail::opt_string(args, "goal"),
              detail::opt_string_list(args, "todo"));
    return Json{{"head", std::string(kDefaultBranch)},
                {"branches", Json::array({std::string(kDefaultBranch)})}};
  }

  const RepoPaths paths = open_repo(root);

  if (op == "ota") {
    const OtaRecord record = append_ota(
        paths, detail::opt_string(args, "observation"),
        detail::opt_string(args, "thought"), detail::opt_string(args, "action"),
        env);
    return Json{{"branch", get_head(paths)},
                {"record", record_to_json(record)}};
  }
  if (op == "commit") {
    CommitRequest request;
    request.message = detail::need_string(args, "message");
    request.contribution = detail::opt_string(args, "contribution");
    if (const Json* roadmap = detail::find_arg(args, "roadmap")) {
      request.revise_roadmap = detail::roadmap_from_json(*roadmap);
    }
    if (const Json* updates = detail::find_arg(args, "metadata_updates")) {
      if (!updates->is_object()) {
        fail(ErrorCode::BadRequest, "args.metadata_updates must be an object");
      }
      for (const auto& [segment, tree] : updates->items()) {
        if (!detail::is_meta_key(segment)) {
          fail(ErrorCode::BadRequest,
               "invalid segment name '" + segment + "'");
        }
        request.metadata_updates[segment] = tree_from_json(tree);
      }
    }
    const CommitEntry entry = commit(paths, request, env);
    return Json{{"branch", get_head(paths)}, {"entry", entry_to_json(entry)}};
  }
  if (op == "branch") {
    const BranchPaths created =
        branch(paths, detail::need_string(args, "name"),
               detail::opt_string(args, "purpose"), env);
    return Json{{"branch", created.name}, {"head", created.name}};
  }
  if (op == "merge") {
    MergeRequest request;
    request.target = detail::need_string(args, "target");
    request.synthesis = detail::opt_string(args, "synthesis");
    if (detail::find_arg(args, "purpose") != nullptr) {
      request.updated_purpose = detail::need_string(args, "purpose");
    }
    if (const Json* roadmap = detail::find_arg(args, "roadmap")) {
      request.revise_roadmap = detail::roadmap_from_json(*roadmap);
    }
    const std::string head = get_head(paths);
    const CommitEntry entry = merge(paths, request, env);
    return Json{{"branch", head},
                {"target", request.target},
                {"entry", entry_to_json(entry)}};
  }
  if (op == "context") {
    return detail::dispatch_context(paths, args, env);
  }
  if (op == "scroll") {
    const std::string direction = detail::need_string(args, "direction");
    if (direction != "up" && direction != "down") {
      fail(ErrorCode::BadRequest, "direction must be 'up' or 'down'");
    }
    const Cursor cursor = Cursor::decode(detail::need_string(args, "cursor"));
    return scroll_to_json(scroll(paths, cursor,
                                 direction == "up" ? ScrollDirection::Up
                                                   : ScrollDirection::Down));
  }
  if (op == "checkpoints") {
    Json list = Json::array();
    for (const CheckpointRecord& record : list_checkpoints(paths)) {
      list.push_back(checkpoint_to_json(record));
    }
    return Json{{"checkpoints", list}};
  }
  if (op == "set_metadata") {
    const std::string segment = detail::need_string(args, "segment");
    const Json* tree = detail::find_arg(args, "tree");
    if (tree == nullptr) {
      fail(ErrorCode::BadRequest, "args.tree is required");
    }
    set_metadata_segment(paths, segment, tree_from_json(*tree), env);
    return Json{{"branch", get_head(paths)}, {"segment", segment}};
  }
  if (op == "update_roadmap") {
    update_roadmap(paths, detail::roadmap_from_json(args), env);
    return Json{{"updated", true}};
  }
  fail(ErrorCode::UnknownOp, std::string(op));
}

}  // namespace gcc
