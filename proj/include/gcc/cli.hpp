#pragma once

// gcc/cli.hpp — the gcc-ctl command line. Parsing happens here; every
// operation then flows through the same dispatch table as the tool server,
// and plain output is formatted from the dispatch result, so the two
// surfaces cannot diverge and --json always carries at least the
// information the plain form shows.
//
// Exit codes: 0 success, 1 domain error ("error: <Code>: <message>" on
// stderr), 2 usage error (usage text on stderr). Output never contains
// absolute paths, so transcripts are portable across machines.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "gcc/checkpoint.hpp"
#include "gcc/dispatch.hpp"
#include "gcc/env.hpp"
#include "gcc/errors.hpp"
#include "gcc/json_views.hpp"
#include "gcc/store.hpp"
#include "gcc/time.hpp"

namespace gcc::cli {

struct CliConfig {
  fs::path working_dir;                  // where discovery starts
  std::optional<fs::path> root_override; // GCC_ROOT
  std::optional<UnixSeconds> now_override;  // GCC_NOW (fixed clock)
  bool vcs_git = false;                  // GCC_VCS=git
  std::istream* input = nullptr;         // stdin, for "--…-file -"
};

struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

namespace detail {

inline constexpr std::string_view kUsage =
    "usage: gcc-ctl [--json] <command> [options]\n"
    "\n"
    "commands:\n"
    "  init         initialize a context repository in the current directory\n"
    "  ota          append an observation-thought-action record to the log\n"
    "  commit       record a milestone commit entry\n"
    "  branch       create a branch and switch to it\n"
    "  merge        merge a branch into the current branch\n"
    "  context      show status, a branch, a commit, the log, or metadata\n"
    "  scroll       page through a paginated context view\n"
    "  checkpoints  list checkpoint ledger entries\n";

inline CliResult usage_error(const std::string& message) {
  std::string err;
  if (!message.empty()) {
    err = "error: " + message + "\n";
  }
  err += kUsage;
  return {2, "", err};
}

inline fs::path discover_root(const CliConfig& config) {
  if (config.root_override) return *config.root_override;
  fs::path probe = fs::absolute(config.working_dir);
  for (;;) {
    std::error_code ec;
    if (fs::is_directory(probe / ".GCC", ec)) return probe;
    const fs::path parent = probe.parent_path();
    if (parent == probe) break;
    probe = parent;
  }
  fail(ErrorCode::NotARepo, "no .GCC repository found");
}

inline std::string read_input_file(const std::string& spec_path,
                                   const CliConfig& config) {
  if (spec_path == "-") {
    if (config.input == nullptr) {
      fail(ErrorCode::IoError, "standard input is not available");
    }
    std::ostringstream buffer;
    buffer << config.input->rdbuf();
    return buffer.str();
  }
  return read_file(fs::path(spec_path));
}

// --- plain formatting helpers ---------------------------------------------

// "label: value" for single-line values; multi-line values are indented
// under the bare label so output stays line-oriented.
inline void labeled(std::string& out, std::string_view label,
                    const std::string& text) {
  const auto parts = lines::split(text);
  if (parts.empty()) {
    out += std::string(label) + ":\n";
    return;
  }
  if (parts.size() == 1) {
    out += std::string(label) + ": " + parts[0] + "\n";
    return;
  }
  out += std::string(label) + ":\n";
  for (const std::string& line : parts) {
    out += "  " + line + "\n";
  }
}

inline std::string format_status(const Json& data) {
  std::string out = "on branch " + data["head"].get<std::string>() + "\n";
  labeled(out, "goal", data["goal"].get<std::string>());
  out += "milestones:\n";
  for (const Json& m : data["milestones"]) {
    out += m["done"].get<bool>() ? "  [x] " : "  [ ] ";
    out += m["text"].get<std::string>();
    out += '\n';
  }
  out += "branches:\n";
  for (const Json& b : data["branches"]) {
    const bool head = b["name"] == data["head"];
    out += head ? "* " : "  ";
    out += b["name"].get<std::string>();
    if (b["merged"].get<bool>()) out += " (merged)";
    out += '\n';
  }
  return out;
}

inline void format_commit_list(std::string& out, const Json& commits) {
  for (const Json& c : commits) {
    out += "  " + c["id"].get<std::string>() + " " +
           c["timestamp"].get<std::string>() + " " +
           c["message"].get<std::string>() + "\n";
  }
}

inline std::string format_branch_view(const Json& data) {
  std::string out;
  labeled(out, "branch", data["branch"].get<std::string>());
  labeled(out, "purpose", data["purpose"].get<std::string>());
  labeled(out, "progress", data["progress"].get<std::string>());
  out += "commits (newest first):\n";
  format_commit_list(out, data["commits"]);
  out += "cursor: " + data["cursor"].get<std::string>() + "\n";
  return out;
}

inline std::string format_log_view(const Json& data) {
  std::string out;
  for (const Json& line : data["lines"]) {
    out += line.get<std::string>();
    out += '\n';
  }
  out += "cursor: " + data["cursor"].get<std::string>() + "\n";
  return out;
}

// Standalone rendering of a metadata segment tree (no enclosing key).
inline std::string format_tree(const Json& tree) {
  if (tree.is_string()) {
    return gcc::detail::render_scalar(tree.get<std::string>()) + "\n";
  }
  if (tree.is_array()) {
    if (tree.empty()) return "[]\n";
    std::string out;
    for (const Json& item : tree) {
      out += "- " + gcc::detail::render_scalar(item.get<std::string>()) + "\n";
    }
    return out;
  }
  if (tree.empty()) return "{}\n";
  MetaTree converted = tree_from_json(tree);
  return render_metadata(converted);
}

inline std::string format_scroll(const Json& data) {
  std::string out;
  if (data["view"] == "commits") {
    format_commit_list(out, data["items"]);
  } else {
    for (const Json& line : data["items"]) {
      out += line.get<std::string>();
      out += '\n';
    }
  }
  out += "cursor: " + data["cursor"].get<std::string>() + "\n";
  if (data["at_edge"].get<bool>()) out += "at edge\n";
  return out;
}

inline std::string format_checkpoints(const Json& data) {
  std::string out;
  for (const Json& c : data["checkpoints"]) {
    out += c["timestamp"].get<std::string>() + "  " +
           c["commit_id"].get<std::string>() + "  " +
           (c["vcs_ref"].is_null() ? "-" : c["vcs_ref"].get<std::string>()) +
           "  " + c["message"].get<std::string>() + "\n";
  }
  return out;
}

inline std::string format_plain(std::string_view op, const Json& args,
                                const Json& data) {
  if (op == "init") {
    return "initialized context repository (branch " +
           data["head"].get<std::string>() + ")\n";
  }
  if (op == "ota") {
    return "recorded OTA " + std::to_string(data["record"]["seq"].get<long long>()) +
           " on " + data["branch"].get<std::string>() + "\n";
  }
  if (op == "commit" || op == "merge") {
    return "[" + data["branch"].get<std::string>() + " " +
           data["entry"]["id"].get<std::string>() + "] " +
           data["entry"]["message"].get<std::string>() + "\n";
  }
  if (op == "branch") {
    return "switched to new branch " + data["branch"].get<std::string>() + "\n";
  }
  if (op == "context") {
    if (args.contains("commit")) {
      CommitEntry entry;
      entry.id = data["entry"]["id"].get<std::string>();
      entry.timestamp =
          parse_timestamp(data["entry"]["timestamp"].get<std::string>())
              .value_or(0);
      entry.message = data["entry"]["message"].get<std::string>();
      entry.branch_purpose = data["entry"]["branch_purpose"].get<std::string>();
      entry.previous_progress =
          data["entry"]["previous_progress"].get<std::string>();
      entry.contribution = data["entry"]["contribution"].get<std::string>();
      return render_commit_entry(entry);
    }
    if (args.contains("log") && args["log"].get<bool>()) {
      return format_log_view(data);
    }
    if (args.contains("metadata")) return format_tree(data["tree"]);
    if (args.contains("branch")) return format_branch_view(data);
    return format_status(data);
  }
  if (op == "scroll") return format_scroll(data);
  if (op == "checkpoints") return format_checkpoints(data);
  return data.dump() + "\n";
}

inline std::string json_dump(const Json& value) {
  return value.dump(-1, ' ', false, Json::error_handler_t::replace) + "\n";
}

}  // namespace detail

// Parses and executes one command line (program name excluded). All output
// is returned, never written to global streams, so tests and golden
// comparisons can run in-process.
inline CliResult run(const std::vector<std::string>& args,
                     const CliConfig& config) {
  CLI::App app{"Git-Context-Controller: versioned memory for agents", "gcc-ctl"};
  app.fallthrough(true);  // lets --json appear after the subcommand too
  app.require_subcommand(0, 1);
  bool json_mode = false;
  app.add_flag("--json", json_mode, "emit JSON instead of plain text");

  // init
  auto* cmd_init = app.add_subcommand("init", "initialize a context repository");
  std::string goal;
  std::vector<std::string> todo;
  cmd_init->add_option("--goal", goal, "project goal")->required();
  cmd_init->add_option("--todo", todo, "initial milestone (repeatable)");

  // ota
  auto* cmd_ota = app.add_subcommand("ota", "append an OTA record");
  std::string observation, thought, action;
  cmd_ota->add_option("-o,--observation", observation, "observation text");
  cmd_ota->add_option("-t,--thought", thought, "thought text");
  cmd_ota->add_option("-a,--action", action, "action text");

  // commit
  auto* cmd_commit = app.add_subcommand("commit", "record a milestone commit");
  std::string message, contribution, contribution_file;
  cmd_commit->add_option("-m,--message", message, "commit message")->required();
  auto* opt_contrib =
      cmd_commit->add_option("-c,--contribution", contribution,
                             "contribution text");
  cmd_commit
      ->add_option("--contribution-file", contribution_file,
                   "read contribution from a file ('-' for stdin)")
      ->excludes(opt_contrib);

  // branch
  auto* cmd_branch = app.add_subcommand("branch", "create a branch and switch");
  std::string branch_name, branch_purpose;
  cmd_branch->add_option("name", branch_name, "new branch name")->required();
  cmd_branch->add_option("-p,--purpose", branch_purpose, "branch purpose");

  // merge
  auto* cmd_merge =
      app.add_subcommand("merge", "merge a branch into the current branch");
  std::string merge_target, synthesis, synthesis_file, merge_purpose,
      roadmap_file;
  bool merge_purpose_set = false;
  cmd_merge->add_option("target", merge_target, "branch to merge")->required();
  auto* opt_synth =
      cmd_merge->add_option("-s,--synthesis", synthesis, "synthesis text");
  cmd_merge
      ->add_option("--synthesis-file", synthesis_file,
                   "read synthesis from a file ('-' for stdin)")
      ->excludes(opt_synth);
  cmd_merge
      ->add_option_function<std::string>(
          "--purpose",
          [&](const std::string& value) {
            merge_purpose = value;
            merge_purpose_set = true;
          },
          "updated purpose for the current branch");
  cmd_merge->add_option("--roadmap-file", roadmap_file,
                        "replace the roadmap from a file ('-' for stdin)");

  // context
  auto* cmd_context =
      app.add_subcommand("context", "retrieve a context view");
  std::string ctx_branch, ctx_commit, ctx_metadata;
  bool ctx_log = false;
  auto* opt_ctx_branch =
      cmd_context->add_option("--branch", ctx_branch, "branch to inspect");
  auto* opt_ctx_commit =
      cmd_context->add_option("--commit", ctx_commit, "commit id to inspect");
  auto* opt_ctx_log = cmd_context->add_flag("--log", ctx_log, "show log tail");
  auto* opt_ctx_meta = cmd_context->add_option("--metadata", ctx_metadata,
                                               "metadata segment to fetch");
  opt_ctx_commit->excludes(opt_ctx_branch);
  opt_ctx_commit->excludes(opt_ctx_log);
  opt_ctx_commit->excludes(opt_ctx_meta);
  opt_ctx_log->excludes(opt_ctx_meta);

  // scroll
  auto* cmd_scroll = app.add_subcommand("scroll", "page through a view");
  std::string direction, cursor_token;
  cmd_scroll->add_option("direction", direction, "up or down")
      ->required()
      ->check(CLI::IsMember({"up", "down"}));
  cmd_scroll->add_option("--cursor", cursor_token, "cursor token")->required();

  // checkpoints
  auto* cmd_checkpoints =
      app.add_subcommand("checkpoints", "list checkpoint ledger entries");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return {0, app.help(), ""};
  } catch (const CLI::CallForAllHelp&) {
    return {0, app.help(), ""};
  } catch (const CLI::ParseError& e) {
    return detail::usage_error(e.what());
  }
  if (app.get_subcommands().empty()) {
    return detail::usage_error("");
  }

  try {
    Env env;
    if (config.now_override) env.clock = fixed_clock(*config.now_override);

    std::string op;
    Json op_args = Json::object();
    fs::path root;

    if (cmd_init->parsed()) {
      op = "init";
      op_args["goal"] = goal;
      op_args["todo"] = todo;
      root = config.root_override ? *config.root_override
                                  : fs::absolute(config.working_dir);
    } else {
      root = detail::discover_root(config);
      if (cmd_ota->parsed()) {
        op = "ota";
        op_args["observation"] = observation;
        op_args["thought"] = thought;
        op_args["action"] = action;
      } else if (cmd_commit->parsed()) {
        op = "commit";
        op_args["message"] = message;
        op_args["contribution"] =
            contribution_file.empty()
                ? contribution
                : detail::read_input_file(contribution_file, config);
      } else if (cmd_branch->parsed()) {
        op = "branch";
        op_args["name"] = branch_name;
        op_args["purpose"] = branch_purpose;
      } else if (cmd_merge->parsed()) {
        op = "merge";
        op_args["target"] = merge_target;
        op_args["synthesis"] =
            synthesis_file.empty()
                ? synthesis
                : detail::read_input_file(synthesis_file, config);
        if (merge_purpose_set) op_args["purpose"] = merge_purpose;
        if (!roadmap_file.empty()) {
          const Roadmap roadmap = parse_roadmap(
              detail::read_input_file(roadmap_file, config));
          op_args["roadmap"] = roadmap_to_json(roadmap);
        }
      } else if (cmd_context->parsed()) {
        op = "context";
        if (!ctx_commit.empty()) op_args["commit"] = ctx_commit;
        if (ctx_log) op_args["log"] = true;
        if (!ctx_metadata.empty()) op_args["metadata"] = ctx_metadata;
        if (!ctx_branch.empty()) op_args["branch"] = ctx_branch;
      } else if (cmd_scroll->parsed()) {
        op = "scroll";
        op_args["cursor"] = cursor_token;
        op_args["direction"] = direction;
      } else if (cmd_checkpoints->parsed()) {
        op = "checkpoints";
      } else {
        return detail::usage_error("");
      }
    }

    GitVcsAdapter git_adapter{root};
    if (config.vcs_git) env.vcs = &git_adapter;

    const Json data = dispatch_op(root, op, op_args, env);
    if (json_mode) {
      return {0, detail::json_dump(data), ""};
    }
    return {0, detail::format_plain(op, op_args, data), ""};
  } catch (const Error& e) {
    return {1, "",
            "error: " + std::string(code_name(e.code())) + ": " + e.what() +
                "\n"};
  } catch (const std::exception& e) {
    return {1, "", std::string("error: IoError: ") + e.what() + "\n"};
  }
}

}  // namespace gcc::cli
