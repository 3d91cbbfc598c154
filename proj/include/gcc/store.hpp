#pragma once

// gcc/store.hpp — the .GCC/ directory layout, repository lifecycle, HEAD
// tracking, and the advisory write lock.
//
// Layout (all writers go through atomic_write):
//   <root>/.GCC/main.md                     project roadmap
//   <root>/.GCC/HEAD                        current branch name + "\n"
//   <root>/.GCC/LOCK                        advisory lock (exists = held)
//   <root>/.GCC/checkpoints.log             append-only checkpoint ledger
//   <root>/.GCC/branches/<name>/commit.md   commit entries
//   <root>/.GCC/branches/<name>/log.md      OTA records
//   <root>/.GCC/branches/<name>/metadata.yaml
//
// DESIGN INVARIANTS
//   - init is all-or-nothing: the tree is staged in a temp directory and
//     renamed to .GCC, so a crash never leaves a half-initialized repo.
//   - HEAD always names an existing branch directory.
//   - Branch names match [A-Za-z0-9._-]+ and are never "." or ".." (path
//     traversal); anything else is InvalidName.
//   - The lock is advisory and cooperative: O_CREAT|O_EXCL creation, holder
//     id + timestamp inside, locks older than a staleness bound are broken.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include "gcc/errors.hpp"
#include "gcc/fsio.hpp"
#include "gcc/model.hpp"
#include "gcc/time.hpp"

namespace gcc {

inline bool is_valid_branch_name(std::string_view name) {
  if (name.empty() || name == "." || name == "..") return false;
  for (char c : name) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

struct BranchPaths {
  std::string name;
  fs::path dir;
  fs::path commit_file;
  fs::path log_file;
  fs::path metadata_file;
};

struct RepoPaths {
  fs::path root;
  fs::path gcc_dir;
  fs::path main_file;
  fs::path head_file;
  fs::path lock_file;
  fs::path checkpoints_file;
  fs::path branches_dir;

  static RepoPaths at(const fs::path& root) {
    RepoPaths p;
    p.root = root;
    p.gcc_dir = root / ".GCC";
    p.main_file = p.gcc_dir / "main.md";
    p.head_file = p.gcc_dir / "HEAD";
    p.lock_file = p.gcc_dir / "LOCK";
    p.checkpoints_file = p.gcc_dir / "checkpoints.log";
    p.branches_dir = p.gcc_dir / "branches";
    return p;
  }

  BranchPaths branch(std::string_view name) const {
    BranchPaths b;
    b.name = std::string(name);
    b.dir = branches_dir / b.name;
    b.commit_file = b.dir / "commit.md";
    b.log_file = b.dir / "log.md";
    b.metadata_file = b.dir / "metadata.yaml";
    return b;
  }

  bool operator==(const RepoPaths&) const = default;
};

inline constexpr std::string_view kDefaultBranch = "main";

namespace detail {

inline MetadataDoc initial_metadata() {
  MetadataDoc doc = MetaTree::map();
  doc.set("file_structure", MetaTree::map());
  doc.set("env_config", MetaTree::map());
  return doc;
}

inline void write_branch_files(const fs::path& dir, const std::string& commits,
                               const std::string& log,
                               const std::string& metadata) {
  atomic_write(dir / "commit.md", commits);
  atomic_write(dir / "log.md", log);
  atomic_write(dir / "metadata.yaml", metadata);
}

}  // namespace detail

// Creates <root>/.GCC with the default branch. The tree is staged next to
// its final location and renamed into place in one step.
inline RepoPaths init_repo(const fs::path& root, const std::string& goal,
                           const std::vector<std::string>& todo) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    fail(ErrorCode::IoError, "root is not a directory: " + root.string());
  }
  const RepoPaths paths = RepoPaths::at(root);
  if (fs::exists(paths.gcc_dir, ec)) {
    fail(ErrorCode::AlreadyInitialized, "repository already initialized");
  }

  fs::path stage = root;
  stage /= ".GCC.stage." + std::to_string(::getpid());
  fs::remove_all(stage, ec);
  fs::create_directories(stage / "branches" / std::string(kDefaultBranch), ec);
  if (ec) {
    fail(ErrorCode::IoError, "cannot stage repository: " + ec.message());
  }

  Roadmap roadmap;
  roadmap.goal = goal;
  for (const std::string& item : todo) roadmap.milestones.push_back({item, false});
  atomic_write(stage / "main.md", render_roadmap(roadmap));
  atomic_write(stage / "HEAD", std::string(kDefaultBranch) + "\n");
  atomic_write(stage / "checkpoints.log", "");
  detail::write_branch_files(stage / "branches" / std::string(kDefaultBranch),
                             "", "", render_metadata(detail::initial_metadata()));

  fs::rename(stage, paths.gcc_dir, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove_all(stage, ignore);
    if (fs::exists(paths.gcc_dir, ignore)) {
      fail(ErrorCode::AlreadyInitialized, "repository already initialized");
    }
    fail(ErrorCode::IoError, "cannot create .GCC: " + ec.message());
  }
  return paths;
}

inline std::string get_head(const RepoPaths& paths) {
  const auto content = read_file_if_exists(paths.head_file);
  if (!content) {
    fail(ErrorCode::CorruptRepo, "HEAD is missing");
  }
  std::string name = *content;
  if (!name.empty() && name.back() == '\n') name.pop_back();
  if (!is_valid_branch_name(name)) {
    fail(ErrorCode::CorruptRepo, "HEAD does not name a branch");
  }
  return name;
}

// Opens an existing repository, verifying the pieces every operation relies
// on: the directory itself, the roadmap, and a HEAD that names an existing
// branch directory.
inline RepoPaths open_repo(const fs::path& root) {
  const RepoPaths paths = RepoPaths::at(root);
  std::error_code ec;
  if (!fs::is_directory(paths.gcc_dir, ec)) {
    fail(ErrorCode::NotARepo, "no .GCC directory at " + root.string());
  }
  if (!fs::exists(paths.main_file, ec) || !fs::is_directory(paths.branches_dir, ec)) {
    fail(ErrorCode::CorruptRepo, ".GCC is missing main.md or branches/");
  }
  const std::string head = get_head(paths);
  if (!fs::is_directory(paths.branch(head).dir, ec)) {
    fail(ErrorCode::CorruptRepo, "HEAD names missing branch '" + head + "'");
  }
  return paths;
}

inline void set_head(const RepoPaths& paths, std::string_view name) {
  std::error_code ec;
  if (!fs::is_directory(paths.branch(name).dir, ec)) {
    fail(ErrorCode::UnknownBranch, std::string(name));
  }
  atomic_write(paths.head_file, std::string(name) + "\n");
}

inline std::vector<std::string> list_branches(const RepoPaths& paths) {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(paths.branches_dir, ec)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (is_valid_branch_name(name)) names.push_back(name);
  }
  if (ec) {
    fail(ErrorCode::IoError, "cannot list branches: " + ec.message());
  }
  std::sort(names.begin(), names.end());
  return names;
}

// ===========================================================================
// Advisory lock
// ===========================================================================

struct LockOptions {
  std::int64_t staleness_secs = 300;  // locks strictly older than this break
  bool wait = true;                   // poll instead of failing immediately
  std::int64_t wait_timeout_ms = 10'000;
  std::int64_t poll_ms = 5;
  std::string holder;                 // defaults to "pid:<pid>"
};

class LockGuard {
 public:
  LockGuard() = default;
  explicit LockGuard(fs::path path) : path_(std::move(path)), held_(true) {}
  LockGuard(LockGuard&& other) noexcept
      : path_(std::move(other.path_)), held_(other.held_) {
    other.held_ = false;
  }
  LockGuard& operator=(LockGuard&& other) noexcept {
    if (this != &other) {
      release();
      path_ = std::move(other.path_);
      held_ = other.held_;
      other.held_ = false;
    }
    return *this;
  }
  LockGuard(const LockGuard&) = delete;
  LockGuard& operator=(const LockGuard&) = delete;
  ~LockGuard() { release(); }

  void release() {
    if (held_) {
      std::error_code ec;
      fs::remove(path_, ec);
      held_ = false;
    }
  }

 private:
  fs::path path_;
  bool held_ = false;
};

namespace detail {

inline std::string default_holder() {
  return "pid:" + std::to_string(::getpid());
}

// The lock file holds "<holder> <timestamp>\n"; the timestamp drives the
// staleness check. An unreadable or unparsable lock counts as fresh (never
// silently break a live writer's lock on a parse quibble).
inline std::optional<UnixSeconds> lock_stamp(const fs::path& lock_file) {
  const auto content = read_file_if_exists(lock_file);
  if (!content) return std::nullopt;
  const std::size_t space = content->rfind(' ');
  if (space == std::string::npos) return std::nullopt;
  std::string stamp = content->substr(space + 1);
  if (!stamp.empty() && stamp.back() == '\n') stamp.pop_back();
  return parse_timestamp(stamp);
}

}  // namespace detail

inline LockGuard acquire_lock(const RepoPaths& paths, const LockOptions& options,
                              const Clock& clock) {
  const std::string holder =
      options.holder.empty() ? detail::default_holder() : options.holder;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::milliseconds(options.wait_timeout_ms);
  for (;;) {
    const int fd =
        ::open(paths.lock_file.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      const std::string body = holder + " " + format_timestamp(clock()) + "\n";
      (void)!::write(fd, body.data(), body.size());
      ::close(fd);
      return LockGuard(paths.lock_file);
    }
    if (errno != EEXIST) {
      fail(ErrorCode::IoError, "cannot create LOCK file");
    }
    const auto stamp = detail::lock_stamp(paths.lock_file);
    if (stamp && clock() - *stamp > options.staleness_secs) {
      std::error_code ec;
      fs::remove(paths.lock_file, ec);  // stale; break it and retry
      continue;
    }
    if (!options.wait || std::chrono::steady_clock::now() >= deadline) {
      fail(ErrorCode::LockHeld, "repository lock is held");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(options.poll_ms));
  }
}

// Runs `action` while holding the repository lock; the lock is released on
// both normal return and exception.
template <typename Action>
inline auto with_lock(const RepoPaths& paths, const LockOptions& options,
                      const Clock& clock, Action&& action)
    -> decltype(action()) {
  LockGuard guard = acquire_lock(paths, options, clock);
  return action();
}

}  // namespace gcc
