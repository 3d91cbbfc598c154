#pragma once

// gcc/fsio.hpp — durable file primitives. Every write in the repository goes
// through atomic_write: content lands in a temp sibling, is flushed, and is
// renamed over the target, so readers observe either the old bytes or the new
// bytes and never a torn file. WriteHooks exposes the instant between flush
// and rename for fault-injection tests.

#include <atomic>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <fcntl.h>
#include <unistd.h>

#include "gcc/errors.hpp"

namespace gcc {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::IoError, "cannot read " + path.filename().string());
  }
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) {
    fail(ErrorCode::IoError, "read failed for " + path.filename().string());
  }
  return content;
}

inline std::optional<std::string> read_file_if_exists(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  return read_file(path);
}

struct WriteHooks {
  // Invoked after the temp file is written and flushed, immediately before
  // the rename. Throwing here aborts the write: the temp file is removed and
  // the target keeps its previous content.
  std::function<void(const fs::path& tmp_path)> before_rename;
};

inline void atomic_write(const fs::path& target, std::string_view content,
                         const WriteHooks& hooks = {}) {
  static std::atomic<unsigned> counter{0};
  const unsigned seq = counter.fetch_add(1, std::memory_order_relaxed);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(seq);

  const int fd = ::open(tmp.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    fail(ErrorCode::IoError,
         "cannot create temp file for " + target.filename().string() + ": " +
             std::strerror(errno));
  }
  auto cleanup = [&tmp]() {
    std::error_code ec;
    fs::remove(tmp, ec);
  };

  std::size_t written = 0;
  while (written < content.size()) {
    const ssize_t n =
        ::write(fd, content.data() + written, content.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string detail = std::strerror(errno);
      ::close(fd);
      cleanup();
      fail(ErrorCode::IoError,
           "write failed for " + target.filename().string() + ": " + detail);
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    cleanup();
    fail(ErrorCode::IoError, "flush failed for " + target.filename().string());
  }

  if (hooks.before_rename) {
    try {
      hooks.before_rename(tmp);
    } catch (...) {
      cleanup();
      throw;
    }
  }

  if (::rename(tmp.c_str(), target.c_str()) != 0) {
    const std::string detail = std::strerror(errno);
    cleanup();
    fail(ErrorCode::IoError,
         "rename failed for " + target.filename().string() + ": " + detail);
  }
}

}  // namespace gcc
