#pragma once

#include <cstddef>
#include <functional>

namespace sfield {

// Caps the worker pool used by parallel_for. 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs body(i) for i in [0, n). Nested calls from inside a worker run
// serially so an outer parallel loop owns the pool.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sfield
