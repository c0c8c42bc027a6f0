#pragma once

#include <cstddef>
#include <cstdint>

namespace litho::parallel {

// Caps worker threads for every OpenMP region in the library.
// jobs == 0 keeps the runtime default (available parallelism).
void set_jobs(int jobs);
int jobs();

// True when parallel kernel variants should be used. Parallel kernels are
// written so each output slot is accumulated in a fixed order, so results
// are bit-identical to the serial references at any thread count.
bool enabled();

// Runs fn(i) for i in [0, n). Iterations must be independent and write
// only to their own output slots.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn);

} // namespace litho::parallel

#ifdef _OPENMP
#include <omp.h>
#endif

namespace litho::parallel {

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
#ifdef _OPENMP
    if (enabled() && n > 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

} // namespace litho::parallel
