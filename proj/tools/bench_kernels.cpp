// Benchmark of the data-parallel kernels against their serial reference
// paths. Both paths are exact: each output element is written once and
// reductions run in a fixed order, so the comparison also asserts bitwise
// equality of the results.

#include "quasisym/convexity.hpp"
#include "quasisym/nonlin.hpp"
#include "quasisym/parallel.hpp"
#include "quasisym/planar.hpp"
#include "quasisym/radial.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

namespace {

double time_ms(const std::function<void()> &fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const std::string &name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s %10.2f ms %10.2f ms   x%.2f   %s\n", name.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "bitwise identical" : "MISMATCH");
}

} // namespace

int main() {
    using namespace quasisym;

    std::printf("thread budget: %d\n", thread_budget());
    std::printf("%-28s %13s %13s\n", "kernel", "serial", "parallel");

    NonlinearitySpec spec;
    spec.k = 2.0;
    spec.p = 5.0;
    spec.dim = 3;
    const auto bundle = make_bundle(spec);

    {
        ProfileTable a, b;
        const double sm = time_ms([&] { a = scan_profile(bundle, 2, 1e-3, 10.0, 400000, Exec::Serial); });
        const double pm = time_ms([&] { b = scan_profile(bundle, 2, 1e-3, 10.0, 400000, Exec::Parallel); });
        report("scan_profile (400k)", sm, pm, a.value == b.value && a.min_value == b.min_value);
    }

    RadialProblemSpec problem;
    problem.domain = RadialDomain::ball(1.0);
    problem.spec = spec;
    problem.target_nodes = 0;
    RadialControls controls;
    controls.grid_points = 40001;
    const auto sol = solve_radial(problem, bundle, controls);

    {
        ResidualReport a, b;
        const double sm = time_ms([&] { a = residuals(sol, bundle, Exec::Serial); });
        const double pm = time_ms([&] { b = residuals(sol, bundle, Exec::Parallel); });
        report("residuals (40k grid)", sm, pm,
               a.semilinear == b.semilinear && a.quasilinear == b.quasilinear);
    }

    {
        MorseReport a, b;
        const double sm = time_ms([&] { a = morse_index(sol, bundle, 24, 4001, Exec::Serial); });
        const double pm = time_ms([&] { b = morse_index(sol, bundle, 24, 4001, Exec::Parallel); });
        bool same = a.index == b.index && a.modes.size() == b.modes.size();
        for (std::size_t i = 0; same && i < a.modes.size(); ++i)
            same = a.modes[i].lambda_min == b.modes[i].lambda_min;
        report("morse modes (l<=24)", sm, pm, same);
    }

    {
        const auto field = rasterize_radial(sol, bundle, 256);
        SymmetryReport a, b;
        const double sm = time_ms([&] { a = symmetry_metrics(field, Exec::Serial); });
        const double pm = time_ms([&] { b = symmetry_metrics(field, Exec::Parallel); });
        report("symmetry scan (360 dirs)", sm, pm,
               a.foliated_deviation == b.foliated_deviation && a.best_xi_angle == b.best_xi_angle);
    }

    return 0;
}
