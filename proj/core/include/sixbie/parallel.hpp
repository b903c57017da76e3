#pragma once

#include <functional>

namespace sixbie {

/// Environment variable overriding the worker count.
inline constexpr const char* kThreadsEnv = "SIXBIE_THREADS";

/// requested > 0 wins; otherwise SIXBIE_THREADS; otherwise the hardware count.
int resolve_threads(int requested = 0);

/// Runs body(worker, i) for i in [0, n) on `threads` workers, with static
/// interleaved scheduling so results do not depend on timing. The first
/// exception thrown by any worker is rethrown.
void parallel_for(int n, int threads, const std::function<void(int worker, int i)>& body);

}  // namespace sixbie
