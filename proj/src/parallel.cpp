#include "quasisym/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace quasisym {

int thread_budget() {
#ifdef _OPENMP
    if (const char *env = std::getenv("QUASISYM_THREADS")) {
        char *end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0)
            return static_cast<int>(n);
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace detail {

void parallel_for_impl(std::size_t n, void *ctx, void (*body)(void *, std::size_t)) {
#ifdef _OPENMP
    const int nt = thread_budget();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::size_t i = 0; i < n; ++i)
        body(ctx, i);
#else
    for (std::size_t i = 0; i < n; ++i)
        body(ctx, i);
#endif
}

} // namespace detail
} // namespace quasisym
