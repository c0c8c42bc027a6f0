#include "litho/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace litho::parallel {

namespace {
std::atomic<int> g_jobs{0};
}

void set_jobs(int j) {
    if (j < 0) j = 0;
    g_jobs.store(j);
#ifdef _OPENMP
    if (j > 0) omp_set_num_threads(j);
#endif
}

int jobs() { return g_jobs.load(); }

bool enabled() {
#ifdef _OPENMP
    return g_jobs.load() != 1 && omp_get_max_threads() > 1;
#else
    return false;
#endif
}

} // namespace litho::parallel
