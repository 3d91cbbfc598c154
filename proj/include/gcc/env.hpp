#pragma once

// gcc/env.hpp — the injected environment every operation receives: the
// clock, the summarizer configuration, an optional VCS adapter for
// checkpoint snapshots, and lock behavior. Defaults give a real system
// clock, the deterministic summarizer, no VCS, and patient locking.

#include "gcc/store.hpp"
#include "gcc/summarizer.hpp"
#include "gcc/time.hpp"

namespace gcc {

struct VcsAdapter;

struct Env {
  Clock clock = system_clock_utc();
  SummarizerSpec summarizer{};
  VcsAdapter* vcs = nullptr;
  LockOptions lock{};
};

}  // namespace gcc
