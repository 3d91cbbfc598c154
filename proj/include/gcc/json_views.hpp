#pragma once

// gcc/json_views.hpp — conversions between library types and JSON wire
// shapes. Uses insertion-ordered JSON so responses and stored trees keep the
// field order they were built with.
//
// Metadata trees map to JSON as: scalar <-> string (non-string JSON scalars
// are stringified), list <-> array, map <-> object. Strings may contain \n
// and \t; other control characters are rejected because the on-disk format
// cannot represent them.

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcc/checkpoint.hpp"
#include "gcc/errors.hpp"
#include "gcc/model.hpp"
#include "gcc/retrieve.hpp"
#include "gcc/time.hpp"

namespace gcc {

using Json = nlohmann::ordered_json;

inline Json milestones_to_json(const std::vector<Milestone>& milestones) {
  Json out = Json::array();
  for (const Milestone& m : milestones) {
    out.push_back(Json{{"text", m.text}, {"done", m.done}});
  }
  return out;
}

inline Json roadmap_to_json(const Roadmap& roadmap) {
  return Json{{"goal", roadmap.goal},
              {"milestones", milestones_to_json(roadmap.milestones)},
              {"notes", roadmap.notes}};
}

inline Json entry_to_json(const CommitEntry& entry) {
  return Json{{"id", entry.id},
              {"timestamp", format_timestamp(entry.timestamp)},
              {"message", entry.message},
              {"branch_purpose", entry.branch_purpose},
              {"previous_progress", entry.previous_progress},
              {"contribution", entry.contribution}};
}

inline Json record_to_json(const OtaRecord& record) {
  Json out{{"seq", record.seq},
           {"timestamp", format_timestamp(record.timestamp)},
           {"observation", record.observation},
           {"thought", record.thought},
           {"action", record.action}};
  out["origin"] = record.origin ? Json(*record.origin) : Json(nullptr);
  return out;
}

inline Json commit_summary_to_json(const CommitSummary& summary) {
  return Json{{"id", summary.id},
              {"timestamp", format_timestamp(summary.timestamp)},
              {"message", summary.message}};
}

inline Json checkpoint_to_json(const CheckpointRecord& record) {
  return Json{{"timestamp", format_timestamp(record.timestamp)},
              {"commit_id", record.commit_id},
              {"vcs_ref", record.vcs_ref ? Json(*record.vcs_ref) : Json(nullptr)},
              {"message", record.message}};
}

inline Json tree_to_json(const MetaTree& tree) {
  switch (tree.kind) {
    case MetaTree::Kind::Scalar:
      return Json(tree.scalar);
    case MetaTree::Kind::List: {
      Json out = Json::array();
      for (const MetaTree& item : tree.items) out.push_back(tree_to_json(item));
      return out;
    }
    case MetaTree::Kind::Map: {
      Json out = Json::object();
      for (const auto& [key, value] : tree.entries) {
        out[key] = tree_to_json(value);
      }
      return out;
    }
  }
  return Json(nullptr);
}

namespace detail {

inline void check_meta_text(const std::string& text) {
  for (char c : text) {
    const auto b = static_cast<unsigned char>(c);
    if (b < 0x20 && c != '\n' && c != '\t') {
      fail(ErrorCode::BadRequest,
           "metadata text cannot contain control characters");
    }
  }
}

inline std::string scalar_from_json(const Json& value) {
  if (value.is_string()) {
    std::string text = value.get<std::string>();
    check_meta_text(text);
    return text;
  }
  if (value.is_number() || value.is_boolean() || value.is_null()) {
    return value.dump();
  }
  fail(ErrorCode::BadRequest, "metadata list elements must be scalars");
}

}  // namespace detail

inline MetaTree tree_from_json(const Json& value) {
  if (value.is_object()) {
    MetaTree map = MetaTree::map();
    for (const auto& [key, child] : value.items()) {
      if (!detail::is_meta_key(key)) {
        fail(ErrorCode::BadRequest, "invalid metadata key '" + key + "'");
      }
      if (map.find(key) != nullptr) {
        fail(ErrorCode::BadRequest, "duplicate metadata key '" + key + "'");
      }
      map.set(key, tree_from_json(child));
    }
    return map;
  }
  if (value.is_array()) {
    MetaTree list = MetaTree::list();
    for (const Json& item : value) {
      list.items.push_back(MetaTree::value(detail::scalar_from_json(item)));
    }
    return list;
  }
  return MetaTree::value(detail::scalar_from_json(value));
}

inline Json status_to_json(const StatusSnapshot& snapshot) {
  Json branches = Json::array();
  for (const BranchInfo& info : snapshot.branches) {
    branches.push_back(Json{{"name", info.name}, {"merged", info.merged}});
  }
  return Json{{"head", snapshot.head},
              {"goal", snapshot.goal},
              {"milestones", milestones_to_json(snapshot.milestones)},
              {"branches", branches}};
}

inline Json branch_view_to_json(const BranchView& view) {
  Json commits = Json::array();
  for (const CommitSummary& c : view.commits) {
    commits.push_back(commit_summary_to_json(c));
  }
  return Json{{"branch", view.branch},
              {"purpose", view.purpose},
              {"progress", view.progress},
              {"commits", commits},
              {"cursor", view.cursor.token()}};
}

inline Json log_view_to_json(const LogView& view) {
  return Json{{"branch", view.branch},
              {"lines", view.lines},
              {"cursor", view.cursor.token()}};
}

inline Json scroll_to_json(const ScrollResult& result) {
  Json items = Json::array();
  if (result.view == Cursor::View::Commits) {
    for (const CommitSummary& c : result.commits) {
      items.push_back(commit_summary_to_json(c));
    }
  } else {
    for (const std::string& line : result.lines) items.push_back(line);
  }
  return Json{{"view", result.view == Cursor::View::Commits ? "commits" : "log"},
              {"branch", result.branch},
              {"items", items},
              {"cursor", result.cursor.token()},
              {"at_edge", result.at_edge}};
}

}  // namespace gcc
