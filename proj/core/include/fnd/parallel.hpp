#pragma once

#include <cstddef>
#include <functional>

namespace fnd {

// Process-wide cap on worker threads (the CLI's --threads flag). 0 means
// "use hardware concurrency". Parallel sections write results into
// preassigned slots, so the cap never changes any output.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn(i) for i in [0, n). Blocks until done. Exceptions from workers
// are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fnd
