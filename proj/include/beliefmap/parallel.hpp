#pragma once

#include <cstddef>
#include <functional>

namespace beliefmap {

// Runs fn(i) for every i in [0, n). When enabled, indices are split into
// contiguous chunks across hardware threads. Each fn(i) must write only to
// its own output slot so the result cannot depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, bool enabled);

}  // namespace beliefmap
