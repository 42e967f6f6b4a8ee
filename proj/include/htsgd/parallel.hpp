// Copyright 2026 the htsgd authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace htsgd {

// Worker count: HTSGD_THREADS if set, else hardware concurrency.
int default_thread_count();

// Runs body(i) for i in [0, n). Work is striped over threads; results must be
// written to per-index slots so the outcome is independent of the thread count.
void parallel_for_index(std::int64_t n, int threads,
                        const std::function<void(std::int64_t)>& body);

}  // namespace htsgd
