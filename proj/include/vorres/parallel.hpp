#pragma once

#include <cstddef>
#include <functional>

namespace vorres {

// Worker count: explicit override if set, else VORRES_THREADS (0 = auto),
// else hardware concurrency.
std::size_t thread_count();
// 0 clears the override.
void set_thread_count(std::size_t n);

// Runs body(i) for i in [0, n). Results must be written to index-owned slots;
// nested calls from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vorres
