#include <doctest.h>
#include <gcc/gcc.hpp>

#include <fstream>

#include "test_support.hpp"

using namespace gcc;
using testsup::TempDir;

// ===========================================================================
// Branch names
// ===========================================================================

TEST_CASE("branch name validation") {
  CHECK(is_valid_branch_name("main"));
  CHECK(is_valid_branch_name("rag-approach"));
  CHECK(is_valid_branch_name("v1.2_beta"));
  CHECK(is_valid_branch_name("0"));
  CHECK(!is_valid_branch_name(""));
  CHECK(!is_valid_branch_name("."));
  CHECK(!is_valid_branch_name(".."));
  CHECK(!is_valid_branch_name("has space"));
  CHECK(!is_valid_branch_name("slash/name"));
  CHECK(!is_valid_branch_name("tab\tname"));
  CHECK(!is_valid_branch_name("plus+name"));
}

// ===========================================================================
// Repository lifecycle
// ===========================================================================

TEST_CASE("init creates the documented layout") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "ship it", {"one", "two"});

  CHECK(fs::is_directory(paths.gcc_dir));
  CHECK(read_file(paths.head_file) == "main\n");
  CHECK(read_file(paths.checkpoints_file) == "");
  CHECK(read_file(paths.main_file) ==
        "# Project Roadmap\n\n## Goal\nship it\n\n## Milestones\n"
        "- [ ] one\n- [ ] two\n");

  const BranchPaths main_branch = paths.branch("main");
  CHECK(read_file(main_branch.commit_file) == "");
  CHECK(read_file(main_branch.log_file) == "");
  CHECK(read_file(main_branch.metadata_file) ==
        "file_structure: {}\nenv_config: {}\n");

  // No staging residue.
  for (const auto& entry : fs::directory_iterator(tmp.dir)) {
    CHECK(entry.path().filename() == ".GCC");
  }
}

TEST_CASE("init twice raises AlreadyInitialized") {
  TempDir tmp;
  init_repo(tmp.dir, "g", {});
  try {
    init_repo(tmp.dir, "g", {});
    FAIL("expected AlreadyInitialized");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AlreadyInitialized);
  }
}

TEST_CASE("open of a plain directory raises NotARepo") {
  TempDir tmp;
  try {
    open_repo(tmp.dir);
    FAIL("expected NotARepo");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotARepo);
  }
}

TEST_CASE("open validates HEAD") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});

  SUBCASE("open after init succeeds and reproduces the same paths") {
    CHECK(open_repo(tmp.dir) == paths);
  }
  SUBCASE("missing HEAD is corrupt") {
    fs::remove(paths.head_file);
    CHECK_THROWS_AS(open_repo(tmp.dir), Error);
    try {
      open_repo(tmp.dir);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorruptRepo);
    }
  }
  SUBCASE("HEAD naming a missing branch is corrupt") {
    atomic_write(paths.head_file, "ghost\n");
    try {
      open_repo(tmp.dir);
      FAIL("expected CorruptRepo");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorruptRepo);
    }
  }
  SUBCASE("HEAD with an invalid name is corrupt") {
    atomic_write(paths.head_file, "bad name\n");
    try {
      open_repo(tmp.dir);
      FAIL("expected CorruptRepo");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorruptRepo);
    }
  }
}

TEST_CASE("set_head switches only to existing branches") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  branch(paths, "other", "p", testsup::fixture_env(0));
  CHECK(get_head(paths) == "other");
  set_head(paths, "main");
  CHECK(get_head(paths) == "main");
  try {
    set_head(paths, "ghost");
    FAIL("expected UnknownBranch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownBranch);
    CHECK(std::string(e.what()) == "ghost");
  }
}

TEST_CASE("list_branches is sorted and ignores foreign entries") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  branch(paths, "zeta", "p", testsup::fixture_env(0));
  set_head(paths, "main");
  branch(paths, "alpha", "p", testsup::fixture_env(1));
  fs::create_directory(paths.branches_dir / "not valid!");
  std::ofstream(paths.branches_dir / "file.txt") << "x";
  CHECK(list_branches(paths) ==
        std::vector<std::string>{"alpha", "main", "zeta"});
}

// ===========================================================================
// Atomic writes
// ===========================================================================

TEST_CASE("atomic_write replaces content and leaves no temp files") {
  TempDir tmp;
  const fs::path target = tmp.dir / "file.txt";
  atomic_write(target, "first");
  CHECK(read_file(target) == "first");
  atomic_write(target, "second");
  CHECK(read_file(target) == "second");
  int entries = 0;
  for (const auto& entry : fs::directory_iterator(tmp.dir)) {
    (void)entry;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("a crash before rename leaves the target untouched") {
  TempDir tmp;
  const fs::path target = tmp.dir / "file.txt";
  atomic_write(target, "stable");

  WriteHooks hooks;
  hooks.before_rename = [](const fs::path&) {
    throw std::runtime_error("injected crash");
  };
  CHECK_THROWS_AS(atomic_write(target, "torn write", hooks),
                  std::runtime_error);

  CHECK(read_file(target) == "stable");
  int entries = 0;
  for (const auto& entry : fs::directory_iterator(tmp.dir)) {
    (void)entry;
    ++entries;
  }
  CHECK(entries == 1);  // the temp sibling was cleaned up
}

TEST_CASE("read_file on a missing path raises IoError") {
  TempDir tmp;
  try {
    read_file(tmp.dir / "missing");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
  CHECK(!read_file_if_exists(tmp.dir / "missing"));
}

// ===========================================================================
// Advisory lock
// ===========================================================================

TEST_CASE("lock file records holder and timestamp") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  LockOptions options;
  options.holder = "tester";
  {
    LockGuard guard = acquire_lock(paths, options, fixed_clock(1735689600));
    CHECK(read_file(paths.lock_file) == "tester 2025-01-01T00:00:00Z\n");
  }
  CHECK(!fs::exists(paths.lock_file));  // released on guard destruction
}

TEST_CASE("a held lock blocks a non-waiting acquirer") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  LockOptions options;
  options.wait = false;
  LockGuard guard = acquire_lock(paths, options, fixed_clock(1000));
  try {
    acquire_lock(paths, options, fixed_clock(1000));
    FAIL("expected LockHeld");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LockHeld);
  }
}

TEST_CASE("stale locks break strictly after the staleness window") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  LockOptions options;
  options.wait = false;

  SUBCASE("a lock exactly at the staleness bound still holds") {
    atomic_write(paths.lock_file, "dead 2025-01-01T00:00:00Z\n");
    CHECK_THROWS_AS(acquire_lock(paths, options, fixed_clock(1735689600 + 300)),
                    Error);
  }
  SUBCASE("one second past the bound the lock is broken") {
    atomic_write(paths.lock_file, "dead 2025-01-01T00:00:00Z\n");
    LockGuard guard =
        acquire_lock(paths, options, fixed_clock(1735689600 + 301));
    // The breaker now owns a fresh lock naming itself.
    const std::string content = read_file(paths.lock_file);
    CHECK(content.find("2025-01-01T00:05:01Z") != std::string::npos);
  }
  SUBCASE("an unreadable lock body counts as fresh") {
    atomic_write(paths.lock_file, "garbage without a stamp");
    CHECK_THROWS_AS(
        acquire_lock(paths, options, fixed_clock(9'000'000'000)), Error);
  }
}

TEST_CASE("a waiting acquirer proceeds once the lock is released") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  // Pre-create a lock, then release it from another thread after a delay.
  LockOptions options;
  options.wait = true;
  options.wait_timeout_ms = 5000;
  auto* guard = new LockGuard(acquire_lock(paths, options, fixed_clock(0)));
  std::thread releaser([guard] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    delete guard;  // releases the lock
  });
  LockGuard mine = acquire_lock(paths, options, fixed_clock(0));
  releaser.join();
  CHECK(fs::exists(paths.lock_file));
}

TEST_CASE("with_lock releases on exception and returns action results") {
  TempDir tmp;
  const RepoPaths paths = init_repo(tmp.dir, "g", {});
  LockOptions options;
  options.wait = false;

  const int value = with_lock(paths, options, fixed_clock(0), [] { return 7; });
  CHECK(value == 7);
  CHECK(!fs::exists(paths.lock_file));

  CHECK_THROWS_AS(with_lock(paths, options, fixed_clock(0),
                            []() -> int { throw std::runtime_error("boom"); }),
                  std::runtime_error);
  CHECK(!fs::exists(paths.lock_file));
}
