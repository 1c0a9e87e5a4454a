#pragma once

#include <cstddef>
#include <functional>

namespace nsob {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Run body(i) for i in [0, n). Iterations must write disjoint state.
/// The first exception thrown by any iteration is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nsob
