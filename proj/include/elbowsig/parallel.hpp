#pragma once

#include <cstddef>
#include <functional>

namespace elbowsig::parallel {

/// Caps the number of worker threads. 0 selects hardware concurrency.
void set_max_threads(int n);
int max_threads();

/// Runs fn(i) for i in [0, count). Tasks must be independent and write only
/// to their own output slots; results are then identical for any thread
/// count. Nested calls execute serially. If tasks throw, the exception from
/// the lowest task index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace elbowsig::parallel

namespace elbowsig {
using parallel::parallel_for;
}  // namespace elbowsig
