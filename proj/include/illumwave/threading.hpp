#ifndef ILLUMWAVE_THREADING_HPP
#define ILLUMWAVE_THREADING_HPP

#include <cstdint>
#include <functional>

namespace ilw {

// Resolves thread count: explicit request > ILLUM_WAVE_THREADS env > 1.
int resolve_threads(int requested);

// Runs fn(slab) for slab in [0, n_slabs) across `threads` workers. The slab
// decomposition is fixed, so per-slab results are independent of the thread
// count; callers reduce partials in slab order to keep sums deterministic.
void parallel_for_slabs(int64_t n_slabs, int threads,
                        const std::function<void(int64_t)>& fn);

}  // namespace ilw

#endif
