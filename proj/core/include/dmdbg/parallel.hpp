#pragma once

#include <cstddef>
#include <functional>

namespace dmdbg {

/// Worker count for internal parallelism. Reads DMDBG_THREADS on every call;
/// unset or invalid values fall back to the hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for every i in [0, count). Each index is executed exactly once
/// by one worker; callers keep results per index and reduce them in index
/// order so outputs do not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dmdbg
