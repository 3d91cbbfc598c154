#pragma once

// gcc/gcc.hpp — umbrella header for the Git-Context-Controller library.

#include "gcc/checkpoint.hpp"
#include "gcc/cli.hpp"
#include "gcc/dispatch.hpp"
#include "gcc/env.hpp"
#include "gcc/errors.hpp"
#include "gcc/fsio.hpp"
#include "gcc/json_views.hpp"
#include "gcc/model.hpp"
#include "gcc/ops.hpp"
#include "gcc/replay.hpp"
#include "gcc/retrieve.hpp"
#include "gcc/sha256.hpp"
#include "gcc/store.hpp"
#include "gcc/summarizer.hpp"
#include "gcc/time.hpp"
#include "gcc/toolserver.hpp"
