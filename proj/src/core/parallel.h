// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace voxsyn {

// Worker cap: VOXSYN_THREADS env if set, else hardware concurrency.
// set_max_threads overrides both (used by multi-seed fan-out to give each
// run a single lane).
int max_threads();
void set_max_threads(int n);

// Splits [0, n) into contiguous chunks, one per worker. The callable receives
// (worker_index, begin, end). Writes must be disjoint per chunk; reductions
// merge explicitly after the join so results never depend on thread count.
void parallel_chunks(std::size_t n, const std::function<void(int, std::size_t, std::size_t)>& fn);

// Convenience per-index form.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace voxsyn
