#pragma once

// gcc/errors.hpp — the closed error-code set shared by the library, the CLI,
// and the tool server. A single enumeration so stderr codes and wire codes
// cannot drift apart.

#include <stdexcept>
#include <string>
#include <string_view>

namespace gcc {

enum class ErrorCode {
  AlreadyInitialized,
  NotARepo,
  CorruptRepo,
  LockHeld,
  IoError,
  UnknownBranch,
  BranchExists,
  InvalidName,
  SelfMerge,
  AlreadyMerged,
  EmptyMessage,
  ParseError,
  UnknownCommit,
  AmbiguousCommit,
  UnknownSegment,
  StaleCursor,
  VcsError,
  BadRequest,
  UnknownOp,
  ScriptError,
};

inline constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::AlreadyInitialized: return "AlreadyInitialized";
    case ErrorCode::NotARepo: return "NotARepo";
    case ErrorCode::CorruptRepo: return "CorruptRepo";
    case ErrorCode::LockHeld: return "LockHeld";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownBranch: return "UnknownBranch";
    case ErrorCode::BranchExists: return "BranchExists";
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::SelfMerge: return "SelfMerge";
    case ErrorCode::AlreadyMerged: return "AlreadyMerged";
    case ErrorCode::EmptyMessage: return "EmptyMessage";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownCommit: return "UnknownCommit";
    case ErrorCode::AmbiguousCommit: return "AmbiguousCommit";
    case ErrorCode::UnknownSegment: return "UnknownSegment";
    case ErrorCode::StaleCursor: return "StaleCursor";
    case ErrorCode::VcsError: return "VcsError";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::UnknownOp: return "UnknownOp";
    case ErrorCode::ScriptError: return "ScriptError";
  }
  return "IoError";
}

// Domain error. The message is kept bare (a branch name, a commit id, a short
// diagnostic) so frontends can format `error: <Code>: <message>` uniformly.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gcc
