#pragma once

// Shared test scaffolding: temp directories, a seeded RNG with generators
// that cover each format's canonical domain, random op scripts for the
// replay harness, and a deterministic fixture repository reused by the
// retrieval and CLI golden tests.

#include <gcc/gcc.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace testsup {

namespace fs = std::filesystem;

struct TempDir {
  fs::path dir;

  TempDir() {
    const fs::path base = fs::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
      fs::path candidate = base / ("gcc-test-" + std::to_string(rd()));
      std::error_code ec;
      if (fs::create_directory(candidate, ec)) {
        dir = std::move(candidate);
        return;
      }
    }
    throw std::runtime_error("cannot create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Inclusive bounds.
  int range(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  bool chance(int percent) { return range(1, 100) <= percent; }

  std::uint64_t raw() { return engine_(); }

  // Short [a-z0-9] identifier, also a valid branch name / metadata key.
  std::string word() {
    static constexpr char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string out;
    const int len = range(1, 8);
    for (int i = 0; i < len; ++i) out += alphabet[range(0, 35)];
    return out;
  }

  // One line of text: printable ASCII with occasional multi-byte UTF-8,
  // never '\n'. May be empty.
  std::string line(int max_len = 40) {
    std::string out;
    const int len = range(0, max_len);
    for (int i = 0; i < len; ++i) {
      const int roll = range(1, 100);
      if (roll <= 70) {
        out += static_cast<char>(range('a', 'z'));
      } else if (roll <= 80) {
        out += ' ';
      } else if (roll <= 90) {
        static constexpr char punct[] = "0123456789.,:;|[]#=-_\"\\{}";
        out += punct[range(0, static_cast<int>(sizeof(punct)) - 2)];
      } else if (roll <= 95) {
        out += static_cast<char>(range('A', 'Z'));
      } else {
        out += "\xc3\xa9";  // é
      }
    }
    return out;
  }

  std::string nonempty_line(int max_len = 40) {
    std::string out = line(max_len);
    if (out.empty()) out = word();
    return out;
  }

  // Multi-line text, possibly empty, possibly with blank edge lines.
  std::string text(int max_lines = 4) {
    const int n = range(0, max_lines);
    std::string out;
    for (int i = 0; i < n; ++i) {
      if (i > 0) out += '\n';
      out += line();
    }
    return out;
  }

  // A canonical block: no leading/trailing blank line.
  std::string block(int max_lines = 4) {
    std::string out = text(max_lines);
    const auto v = gcc::lines::split(out + "\n");
    return gcc::lines::join_block(v, 0, v.size());
  }

  gcc::UnixSeconds timestamp() {
    // 1970 .. ~2200, seconds.
    return static_cast<gcc::UnixSeconds>(raw() % 7'258'118'400ULL);
  }

  std::string hex8() {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 8; ++i) out += digits[range(0, 15)];
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Canonical-domain generators for the four formats
// ---------------------------------------------------------------------------

inline gcc::Roadmap gen_roadmap(Rng& rng) {
  gcc::Roadmap roadmap;
  // Goal lines must not equal a section header.
  if (rng.chance(85)) {
    std::string goal;
    const int n = rng.range(1, 3);
    for (int i = 0; i < n; ++i) {
      std::string l = rng.nonempty_line();
      if (l == "## Milestones" || l == "## Notes") l += " x";
      if (i > 0) goal += '\n';
      goal += l;
    }
    roadmap.goal = goal;
  }
  const int milestones = rng.range(0, 6);
  for (int i = 0; i < milestones; ++i) {
    roadmap.milestones.push_back({rng.line(), rng.chance(40)});
  }
  if (rng.chance(50)) {
    std::string notes;
    const int n = rng.range(1, 3);
    for (int i = 0; i < n; ++i) {
      if (i > 0) notes += '\n';
      notes += rng.nonempty_line();
    }
    roadmap.notes = notes;
  }
  return roadmap;
}

// A block legal inside a commit entry: no heading lines, no entry headers.
inline std::string gen_commit_block(Rng& rng) {
  std::string out;
  const int n = rng.range(0, 4);
  for (int i = 0; i < n; ++i) {
    std::string l = (i == 0 || i + 1 == n) ? rng.nonempty_line() : rng.line();
    if (l == gcc::kPurposeHeading || l == gcc::kProgressHeading ||
        l == gcc::kContributionHeading || gcc::lines::starts_with(l, "# COMMIT ")) {
      l = "x" + l;
    }
    if (i > 0) out += '\n';
    out += l;
  }
  return out;
}

inline gcc::CommitEntry gen_commit_entry(Rng& rng) {
  gcc::CommitEntry entry;
  entry.id = rng.hex8();
  entry.timestamp = rng.timestamp();
  entry.message = rng.line();
  if (rng.chance(15)) entry.message += " | tricky";
  entry.branch_purpose = gen_commit_block(rng);
  entry.previous_progress = gen_commit_block(rng);
  entry.contribution = gen_commit_block(rng);
  return entry;
}

inline std::vector<gcc::CommitEntry> gen_commit_file(Rng& rng) {
  std::vector<gcc::CommitEntry> entries;
  const int n = rng.range(0, 6);
  for (int i = 0; i < n; ++i) entries.push_back(gen_commit_entry(rng));
  return entries;
}

inline gcc::OtaRecord gen_ota(Rng& rng) {
  gcc::OtaRecord record;
  record.seq = rng.range(0, 999999);
  record.timestamp = rng.timestamp();
  record.observation = rng.text();
  record.thought = rng.text();
  record.action = rng.text();
  return record;
}

// Canonical record list: native records first, then tagged groups.
inline std::vector<gcc::OtaRecord> gen_log(Rng& rng) {
  std::vector<gcc::OtaRecord> records;
  const int native = rng.range(0, 4);
  for (int i = 0; i < native; ++i) records.push_back(gen_ota(rng));
  const int groups = rng.range(0, 2);
  for (int g = 0; g < groups; ++g) {
    const std::string origin = rng.word();
    const int n = rng.range(1, 3);
    for (int i = 0; i < n; ++i) {
      gcc::OtaRecord record = gen_ota(rng);
      record.origin = origin;
      records.push_back(record);
    }
  }
  return records;
}

// Scalar text: anything without control characters other than \n and \t.
inline std::string gen_meta_scalar(Rng& rng) {
  const int roll = rng.range(1, 100);
  if (roll <= 10) return "";
  if (roll <= 14) return "{}";
  if (roll <= 18) return "[]";
  if (roll <= 24) return " edge space ";
  if (roll <= 30) return "\"quoted\" with \\ and\nnewline\tand tab";
  std::string out = rng.line();
  if (rng.chance(20)) out += "\n" + rng.line();
  return out;
}

inline gcc::MetaTree gen_meta_tree(Rng& rng, int depth) {
  const int roll = rng.range(1, 100);
  if (depth >= 3 || roll <= 50) return gcc::MetaTree::value(gen_meta_scalar(rng));
  if (roll <= 70) {
    gcc::MetaTree list = gcc::MetaTree::list();
    const int n = rng.range(0, 4);
    for (int i = 0; i < n; ++i) {
      list.items.push_back(gcc::MetaTree::value(gen_meta_scalar(rng)));
    }
    return list;
  }
  gcc::MetaTree map = gcc::MetaTree::map();
  const int n = rng.range(0, 4);
  for (int i = 0; i < n; ++i) {
    std::string key = rng.word() + std::to_string(i);  // distinct per map
    map.set(key, gen_meta_tree(rng, depth + 1));
  }
  return map;
}

inline gcc::MetadataDoc gen_metadata(Rng& rng) {
  gcc::MetadataDoc doc = gcc::MetaTree::map();
  const int n = rng.range(0, 3);
  for (int i = 0; i < n; ++i) {
    doc.set(rng.word() + std::to_string(i), gen_meta_tree(rng, 1));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Random op scripts (JSONL text) for the replay harness
// ---------------------------------------------------------------------------

// Generates a script whose steps are valid with high probability, tracking
// enough model state (branches, head, merged flags) to keep ops legal.
// Returns JSONL text parseable by gcc::parse_script_text.
inline std::string gen_script_text(Rng& rng, int max_steps) {
  using gcc::Json;
  std::vector<Json> steps;
  std::vector<std::string> clock;
  gcc::UnixSeconds now =
      1'700'000'000 + static_cast<gcc::UnixSeconds>(rng.range(0, 1000000));
  auto stamp = [&]() {
    now += rng.range(0, 120);
    clock.push_back(gcc::format_timestamp(now));
  };

  std::vector<std::string> branches = {"main"};
  std::map<std::string, bool> merged;
  std::string head = "main";
  int branch_counter = 0;

  Json init = Json{{"op", "init"},
                   {"args", Json{{"goal", "goal " + rng.word()},
                                 {"todo", Json::array({"t-" + rng.word()})}}},
                   {"expect", Json{{"ok", true}}}};
  steps.push_back(init);
  stamp();

  const int n = rng.range(1, max_steps - 1);
  for (int i = 0; i < n; ++i) {
    const int roll = rng.range(1, 100);
    if (roll <= 30) {
      steps.push_back(Json{
          {"op", "ota"},
          {"args", Json{{"observation", "saw " + rng.word()},
                        {"thought", "think " + rng.word()},
                        {"action", "do " + rng.word()}}},
          {"expect", Json{{"ok", true}}}});
      stamp();
    } else if (roll <= 55) {
      steps.push_back(Json{{"op", "commit"},
                           {"args", Json{{"message", "m " + rng.word()},
                                         {"contribution", rng.word()}}},
                           {"expect", Json{{"ok", true}}}});
      stamp();
    } else if (roll <= 70) {
      const std::string name = "b" + std::to_string(branch_counter++);
      steps.push_back(Json{{"op", "branch"},
                           {"args", Json{{"name", name},
                                         {"purpose", "try " + rng.word()}}},
                           {"expect", Json{{"ok", true}}}});
      branches.push_back(name);
      head = name;
      stamp();
    } else if (roll <= 80) {
      std::vector<std::string> targets;
      for (const std::string& b : branches) {
        if (b != head && !merged[b]) targets.push_back(b);
      }
      if (targets.empty()) continue;
      const std::string target = targets[rng.range(0, static_cast<int>(targets.size()) - 1)];
      steps.push_back(Json{{"op", "merge"},
                           {"args", Json{{"target", target},
                                         {"synthesis", "keep " + rng.word()}}},
                           {"expect", Json{{"ok", true}}}});
      merged[target] = true;
      stamp();
    } else if (roll <= 88) {
      steps.push_back(Json{
          {"op", "set_metadata"},
          {"args", Json{{"segment", "seg" + std::to_string(rng.range(0, 2))},
                        {"tree", Json{{"k" + rng.word(), rng.word()}}}}},
          {"expect", Json{{"ok", true}}}});
      stamp();
    } else if (roll <= 94) {
      Json args = Json::object();
      if (rng.chance(40)) args["log"] = true;
      steps.push_back(Json{{"op", "context"}, {"args", args}});
    } else {
      steps.push_back(Json{{"op", "checkpoints"}, {"args", Json::object()}});
    }
  }

  Json header = Json{{"version", 1}, {"fresh", true}, {"clock", clock}};
  std::string out = header.dump() + "\n";
  for (const Json& step : steps) out += step.dump() + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic fixture repository
// ---------------------------------------------------------------------------

inline gcc::UnixSeconds fixture_time(int minutes) {
  return 1746100800 + 60 * minutes;  // 2025-05-01T12:00:00Z + N minutes
}

inline gcc::Env fixture_env(int minutes) {
  gcc::Env env;
  env.clock = gcc::fixed_clock(fixture_time(minutes));
  return env;
}

// Builds the standard fixture: main with one OTA + one commit, a branch
// "rag-approach" with its own work, main merged into it, metadata set,
// one roadmap milestone marked done. Head ends on "rag-approach".
inline gcc::RepoPaths make_fixture_repo(const fs::path& root) {
  gcc::RepoPaths paths = gcc::init_repo(
      root, "Build a retriever", {"index corpus", "eval recall"});
  gcc::append_ota(paths, "repo has no tests", "need a harness first",
                  "create tests/", fixture_env(0));
  gcc::commit(paths,
              {"bootstrap harness", "added tests/ skeleton with first suite",
               std::nullopt, {}},
              fixture_env(1));
  gcc::branch(paths, "rag-approach", "try retrieval-augmented variant",
              fixture_env(2));
  gcc::append_ota(paths, "baseline recall 0.41", "chunking too coarse",
                  "halve chunk size", fixture_env(3));
  gcc::commit(paths, {"tune chunking", "chunk size 256, recall 0.52",
                      std::nullopt, {}},
              fixture_env(4));
  gcc::merge(paths,
             {"main", "shared harness retained; rag branch carries tuning",
              std::nullopt, std::nullopt},
             fixture_env(5));
  gcc::MetaTree files = gcc::MetaTree::map();
  files.set("src", gcc::MetaTree::list({gcc::MetaTree::value("retriever.py"),
                                        gcc::MetaTree::value("eval.py")}));
  gcc::set_metadata_segment(paths, "file_structure", files, fixture_env(6));
  gcc::Roadmap roadmap = gcc::read_roadmap(paths);
  roadmap.milestones[0].done = true;
  gcc::update_roadmap(paths, roadmap, fixture_env(7));
  return paths;
}

}  // namespace testsup
