#pragma once

#include <cstddef>
#include <functional>

namespace chaoslab {

/// Process-wide worker count used by parallel_for. Results never depend on it:
/// every parallel loop writes into indexed slots and reductions happen
/// afterwards in index order.
void set_num_threads(unsigned threads);
unsigned num_threads();

/// Runs body(i) for i in [0, count). Nested calls from inside a worker run
/// serially on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace chaoslab
