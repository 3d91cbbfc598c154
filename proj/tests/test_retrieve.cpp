#include <doctest.h>
#include <gcc/gcc.hpp>

#include <set>

#include "test_support.hpp"

using namespace gcc;
using testsup::TempDir;

namespace {

// A repo whose main branch has exactly `n` commits, made with distinct
// messages "c1".."cN" at one-minute intervals.
RepoPaths commits_fixture(const fs::path& root, int n) {
  RepoPaths paths = init_repo(root, "g", {});
  for (int i = 1; i <= n; ++i) {
    commit(paths, {"c" + std::to_string(i), "work " + std::to_string(i),
                   std::nullopt, {}},
           testsup::fixture_env(i));
  }
  return paths;
}

// A repo whose main log.md holds exactly `n` physical lines: OTA records
// are 4 lines each, padded at the end with a record carrying a multi-line
// observation.
RepoPaths log_lines_fixture(const fs::path& root, int n) {
  RepoPaths paths = init_repo(root, "g", {});
  REQUIRE(n >= 4);
  const int whole = n / 4;
  const int extra = n % 4;
  for (int i = 0; i < whole - 1; ++i) {
    append_ota(paths, "obs " + std::to_string(i), "t", "a",
               testsup::fixture_env(i));
  }
  std::string final_obs = "obs tail";
  for (int i = 0; i < extra; ++i) final_obs += "\ncontinued " + std::to_string(i);
  append_ota(paths, final_obs, "t", "a", testsup::fixture_env(whole));
  const std::string text = read_log_text(paths, "main");
  REQUIRE(lines::split(text).size() == static_cast<std::size_t>(n));
  return paths;
}

}  // namespace

// ===========================================================================
// Status
// ===========================================================================

TEST_CASE("status reports head, roadmap, and branch merge flags") {
  TempDir tmp;
  const RepoPaths paths = testsup::make_fixture_repo(tmp.dir);
  const StatusSnapshot status = context_status(paths);
  CHECK(status.head == "rag-approach");
  CHECK(status.goal == "Build a retriever");
  REQUIRE(status.milestones.size() == 2);
  CHECK(status.milestones[0] == Milestone{"index corpus", true});
  CHECK(status.milestones[1] == Milestone{"eval recall", false});
  REQUIRE(status.branches.size() == 2);
  CHECK(status.branches[0] == BranchInfo{"main", true});
  CHECK(status.branches[1] == BranchInfo{"rag-approach", false});
}

TEST_CASE("a corrupt roadmap surfaces as CorruptRepo with a reason") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  atomic_write(paths.main_file, "not a roadmap\n");
  try {
    context_status(paths);
    FAIL("expected CorruptRepo");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptRepo);
    CHECK(std::string(e.what()).find("main.md unreadable") == 0);
  }
}

// ===========================================================================
// Branch view and the ten-commit window
// ===========================================================================

TEST_CASE("a branch with 25 commits serves the latest 10, newest first") {
  TempDir tmp;
  const RepoPaths paths = commits_fixture(tmp.dir, 25);
  const BranchView view = context_branch(paths, "main");
  REQUIRE(view.commits.size() == 10);
  CHECK(view.commits.front().message == "c25");
  CHECK(view.commits.back().message == "c16");
  CHECK(view.cursor.start == 15);
  CHECK(view.cursor.size == 10);
}

TEST_CASE("branch view carries purpose and folded progress") {
  TempDir tmp;
  const RepoPaths paths = testsup::make_fixture_repo(tmp.dir);
  const BranchView view = context_branch(paths, "rag-approach");
  CHECK(view.purpose == "try retrieval-augmented variant");
  // progress = fold(last.previous_progress, last.contribution) of the merge
  // entry, i.e. everything known after the merge.
  const auto entries = read_commit_entries(paths, "rag-approach");
  CHECK(view.progress ==
        fold(entries.back().previous_progress, entries.back().contribution));
  CHECK(view.progress.find("shared harness retained") != std::string::npos);
}

TEST_CASE("scrolling up through 25 commits visits each exactly once") {
  TempDir tmp;
  const RepoPaths paths = commits_fixture(tmp.dir, 25);
  const BranchView view = context_branch(paths, "main");

  // Window 1: entries 25..16 (newest first).
  std::vector<std::string> seen;
  for (const CommitSummary& c : view.commits) seen.push_back(c.message);

  // Window 2: up -> entries 15..6.
  const ScrollResult second = scroll(paths, view.cursor, ScrollDirection::Up);
  CHECK(second.cursor.start == 5);
  CHECK(!second.at_edge);
  REQUIRE(second.commits.size() == 10);
  CHECK(second.commits.front().message == "c15");
  CHECK(second.commits.back().message == "c6");
  for (const CommitSummary& c : second.commits) seen.push_back(c.message);

  // Window 3: up -> entries 5..1, flagged as the edge.
  const ScrollResult third = scroll(paths, second.cursor, ScrollDirection::Up);
  CHECK(third.cursor.start == 0);
  CHECK(third.at_edge);
  REQUIRE(third.commits.size() == 5);
  CHECK(third.commits.front().message == "c5");
  CHECK(third.commits.back().message == "c1");
  for (const CommitSummary& c : third.commits) seen.push_back(c.message);

  // Exactly 25 distinct messages: no duplicates, no gaps.
  CHECK(seen.size() == 25);
  CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == 25);

  // Pinned at the edge: up again returns the same window, still flagged.
  const ScrollResult pinned = scroll(paths, third.cursor, ScrollDirection::Up);
  CHECK(pinned.at_edge);
  CHECK(pinned.cursor.start == 0);
  REQUIRE(pinned.commits.size() == 5);

  // Scrolling back down re-tiles the same windows.
  const ScrollResult down1 = scroll(paths, pinned.cursor, ScrollDirection::Down);
  CHECK(down1.cursor.start == 5);
  CHECK(!down1.at_edge);
  const ScrollResult down2 = scroll(paths, down1.cursor, ScrollDirection::Down);
  CHECK(down2.cursor.start == 15);
  CHECK(down2.at_edge);  // newest window reached
}

// ===========================================================================
// Log view and the twenty-line window
// ===========================================================================

TEST_CASE("a 45-line log scrolls as three disjoint windows") {
  TempDir tmp;
  const RepoPaths paths = log_lines_fixture(tmp.dir, 45);
  const std::vector<std::string> all =
      lines::split(read_log_text(paths, "main"));

  const LogView view = context_log(paths, std::nullopt);
  REQUIRE(view.lines.size() == 20);
  // Lines 26..45 (1-based), i.e. indices 25..44.
  CHECK(view.lines.front() == all[25]);
  CHECK(view.lines.back() == all[44]);
  CHECK(view.cursor.start == 25);

  const ScrollResult second = scroll(paths, view.cursor, ScrollDirection::Up);
  REQUIRE(second.lines.size() == 20);  // lines 6..25
  CHECK(second.lines.front() == all[5]);
  CHECK(second.lines.back() == all[24]);
  CHECK(!second.at_edge);

  const ScrollResult third = scroll(paths, second.cursor, ScrollDirection::Up);
  REQUIRE(third.lines.size() == 5);  // lines 1..5
  CHECK(third.lines.front() == all[0]);
  CHECK(third.lines.back() == all[4]);
  CHECK(third.at_edge);

  // Down from the initial window clamps and flags the edge.
  const ScrollResult clamped = scroll(paths, view.cursor, ScrollDirection::Down);
  CHECK(clamped.at_edge);
  CHECK(clamped.cursor.start == 25);
  REQUIRE(clamped.lines.size() == 20);
}

TEST_CASE("an empty log yields an empty window at the start") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  const LogView view = context_log(paths, std::nullopt);
  CHECK(view.lines.empty());
  CHECK(view.cursor.start == 0);
  CHECK(view.branch == "main");
}

TEST_CASE("a log shorter than one window is served whole") {
  TempDir tmp;
  const RepoPaths paths = log_lines_fixture(tmp.dir, 12);
  const LogView view = context_log(paths, std::nullopt);
  CHECK(view.lines.size() == 12);
  CHECK(view.cursor.start == 0);
  const ScrollResult up = scroll(paths, view.cursor, ScrollDirection::Up);
  CHECK(up.at_edge);
  CHECK(up.lines.size() == 12);
}

TEST_CASE("log views can target another branch explicitly") {
  TempDir tmp;
  const RepoPaths paths = testsup::make_fixture_repo(tmp.dir);
  const LogView main_view = context_log(paths, std::string_view("main"));
  CHECK(main_view.branch == "main");
  REQUIRE(!main_view.lines.empty());
  CHECK(main_view.lines[0].find("=== OTA 1 ") == 0);
}

// ===========================================================================
// Commit lookup
// ===========================================================================

TEST_CASE("commit lookup finds entries across branches") {
  TempDir tmp;
  const RepoPaths paths = testsup::make_fixture_repo(tmp.dir);
  const auto entries = read_commit_entries(paths, "main");
  const FoundCommit found = context_commit(paths, entries.back().id);
  CHECK(found.branch == "main");
  CHECK(found.entry == entries.back());
}

TEST_CASE("unknown and ambiguous commit ids are distinct errors") {
  TempDir tmp;
  const RepoPaths paths = testsup::make_fixture_repo(tmp.dir);
  try {
    context_commit(paths, "00000000");
    FAIL("expected UnknownCommit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownCommit);
    CHECK(std::string(e.what()) == "00000000");
  }

  // Forge the same id on both branches to provoke ambiguity.
  CommitEntry clone;
  clone.id = "abcdabcd";
  clone.timestamp = 0;
  clone.message = "forged";
  for (const char* name : {"main", "rag-approach"}) {
    auto entries = read_commit_entries(paths, name);
    entries.push_back(clone);
    atomic_write(paths.branch(name).commit_file, render_commit_file(entries));
  }
  try {
    context_commit(paths, "abcdabcd");
    FAIL("expected AmbiguousCommit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AmbiguousCommit);
    CHECK(std::string(e.what()) == "abcdabcd");
  }
}

// ===========================================================================
// Metadata views
// ===========================================================================

TEST_CASE("metadata segments resolve per branch") {
  TempDir tmp;
  const RepoPaths paths = testsup::make_fixture_repo(tmp.dir);
  const MetadataView view =
      context_metadata(paths, "file_structure", std::nullopt);
  CHECK(view.branch == "rag-approach");
  const MetaTree* src = view.tree.find("src");
  REQUIRE(src != nullptr);
  REQUIRE(src->items.size() == 2);
  CHECK(src->items[0].scalar == "retriever.py");

  // main never got the segment contents; its copy is still empty.
  const MetadataView main_view =
      context_metadata(paths, "file_structure", std::string_view("main"));
  CHECK(main_view.tree.entries.empty());

  try {
    context_metadata(paths, "nope", std::nullopt);
    FAIL("expected UnknownSegment");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownSegment);
    CHECK(std::string(e.what()) == "nope");
  }
}

// ===========================================================================
// Cursors
// ===========================================================================

TEST_CASE("cursor tokens round trip") {
  Cursor cursor{Cursor::View::Log, "rag", 25, 20, "deadbeefdeadbeef"};
  const std::string token = cursor.token();
  CHECK(token == "bG9nOnJhZzoyNToyMDpkZWFkYmVlZmRlYWRiZWVm");  // pinned
  CHECK(Cursor::decode(token) == cursor);

  Cursor commits{Cursor::View::Commits, "main", 0, 10, "0123456789abcdef"};
  CHECK(commits.token() == "Y29tbWl0czptYWluOjA6MTA6MDEyMzQ1Njc4OWFiY2RlZg");
  CHECK(Cursor::decode(commits.token()) == commits);
}

TEST_CASE("malformed cursor tokens are rejected") {
  for (const std::string bad :
       {"", "!!!", "bm90LWEtY3Vyc29y",  // "not-a-cursor"
        "Y29tbWl0czptYWluOjA6MTA"}) {   // missing fingerprint field
    try {
      Cursor::decode(bad);
      FAIL("expected BadRequest");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadRequest);
    }
  }
}

TEST_CASE("mutation invalidates outstanding cursors") {
  TempDir tmp;
  const RepoPaths paths = log_lines_fixture(tmp.dir, 45);
  const LogView view = context_log(paths, std::nullopt);
  append_ota(paths, "new", "t", "a", testsup::fixture_env(99));
  try {
    scroll(paths, view.cursor, ScrollDirection::Up);
    FAIL("expected StaleCursor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StaleCursor);
    CHECK(std::string(e.what()) ==
          "content changed since the cursor was issued");
  }
  // A freshly issued cursor works again.
  const LogView fresh = context_log(paths, std::nullopt);
  CHECK_NOTHROW(scroll(paths, fresh.cursor, ScrollDirection::Up));
}

TEST_CASE("commit cursors go stale independently of log cursors") {
  TempDir tmp;
  const RepoPaths paths = commits_fixture(tmp.dir, 12);
  const BranchView view = context_branch(paths, "main");
  // Appending to the log does not touch commit.md; the cursor stays valid.
  append_ota(paths, "o", "t", "a", testsup::fixture_env(50));
  CHECK_NOTHROW(scroll(paths, view.cursor, ScrollDirection::Up));
  // A new commit rewrites commit.md; now it is stale.
  commit(paths, {"c13", "w", std::nullopt, {}}, testsup::fixture_env(51));
  CHECK_THROWS_AS(scroll(paths, view.cursor, ScrollDirection::Up), Error);
}

TEST_CASE("scrolling an unknown branch fails cleanly") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  Cursor cursor{Cursor::View::Log, "ghost", 0, 20, "0000000000000000"};
  try {
    scroll(paths, cursor, ScrollDirection::Up);
    FAIL("expected UnknownBranch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownBranch);
  }
}

// ===========================================================================
// Window arithmetic properties
// ===========================================================================

TEST_CASE("upward scroll visits every line exactly once for random sizes") {
  testsup::Rng rng(108);
  for (int iter = 0; iter < 10; ++iter) {
    TempDir tmp;
    const int n = rng.range(4, 120);
    CAPTURE(n);
    const RepoPaths paths = log_lines_fixture(tmp.dir, n);
    const LogView view = context_log(paths, std::nullopt);

    std::vector<std::string> collected = view.lines;
    Cursor cursor = view.cursor;
    bool at_edge = cursor.start == 0;
    int guard = 0;
    while (!at_edge && guard++ < 50) {
      const ScrollResult result = scroll(paths, cursor, ScrollDirection::Up);
      collected.insert(collected.begin(), result.lines.begin(),
                       result.lines.end());
      cursor = result.cursor;
      at_edge = result.at_edge;
    }
    CHECK(collected == lines::split(read_log_text(paths, "main")));
  }
}
