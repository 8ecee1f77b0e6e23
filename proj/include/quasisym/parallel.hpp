#pragma once

#include <cstddef>
#include <memory>
#include <type_traits>

namespace quasisym {

/// Execution policy for the data-parallel kernels. Serial is the reference
/// path; Parallel dispatches the same loop body through OpenMP. Both paths
/// write each output element exactly once and keep reductions ordered, so
/// results are bitwise identical.
enum class Exec { Serial, Parallel };

/// Thread budget for Exec::Parallel: QUASISYM_THREADS if set to a positive
/// integer, otherwise the OpenMP default. Returns 1 when built without OpenMP.
int thread_budget();

namespace detail {
void parallel_for_impl(std::size_t n, void *ctx, void (*body)(void *, std::size_t));
}

/// Run body(i) for i in [0, n). Exec::Parallel splits the range across
/// threads; the body must only write state owned by index i.
template <class Body>
void parallel_for(Exec exec, std::size_t n, Body &&body) {
    if (exec == Exec::Serial) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    using Fn = std::remove_reference_t<Body>;
    auto trampoline = [](void *ctx, std::size_t i) { (*static_cast<Fn *>(ctx))(i); };
    detail::parallel_for_impl(n, std::addressof(body), trampoline);
}

} // namespace quasisym
