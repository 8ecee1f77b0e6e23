#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quasisym/planar.hpp"
#include "support.hpp"

#include <cmath>

using namespace quasisym;
using testsupport::power_spec;

namespace {

constexpr double kPi = 3.14159265358979323846;

PlanarField empty_field(double L, double H, int n1, int n2) {
    PlanarField f;
    f.L = L;
    f.H = H;
    f.n1 = n1;
    f.n2 = n2;
    f.v.assign(static_cast<std::size_t>(n1 + 1) * (n2 + 1), 0.0);
    f.u = f.v;
    return f;
}

/// Fill v from a function of (x1, x2), zeroing the Dirichlet boundary.
template <class F>
void fill(PlanarField &f, F &&fn) {
    for (int i = 0; i <= f.n1; ++i)
        for (int j = 0; j <= f.n2; ++j) {
            bool boundary = (i == 0 || i == f.n1 || j == 0 || j == f.n2);
            f.v[f.idx(i, j)] = boundary ? 0.0 : fn(f.x1(i), f.x2(j));
        }
    f.u = f.v;
}

} // namespace

TEST_CASE("mesh geometry and validation") {
    PlanarProblemSpec prob;
    prob.spec = power_spec(2.0, 5.0, 2);
    CHECK_NOTHROW(prob.validate());
    prob.n1 = 7; // reflection needs an even cell count across
    CHECK_THROWS_AS(prob.validate(), usage_error);
    prob.n1 = 64;
    prob.L = -1.0;
    CHECK_THROWS_AS(prob.validate(), usage_error);

    auto f = empty_field(2.0, 1.0, 8, 4);
    CHECK(f.x1(0) == -2.0);
    CHECK(f.x1(4) == 0.0);
    CHECK(f.x1(8) == 2.0);
    CHECK(f.x2(0) == 0.0);
    CHECK(f.x2(4) == 1.0);
    CHECK(f.hx() == doctest::Approx(0.5));
    CHECK(f.hy() == doctest::Approx(0.25));
}

TEST_CASE("five-point residual is exact for per-axis quadratics") {
    auto f = empty_field(1.0, 1.0, 32, 16);
    auto poly = [](double x, double y) { return (1.0 - x * x) * y * (1.0 - y); };
    fill(f, poly);
    // -Lap of the product: 2 y (1 - y) + 2 (1 - x^2)
    auto h = [](double x1, double x2, double) {
        return 2.0 * x2 * (1.0 - x2) + 2.0 * (1.0 - x1 * x1);
    };
    CHECK(planar_residual(f, h) < 1e-10);
}

TEST_CASE("five-point residual shows second-order decay on a smooth field") {
    const double lam = kPi * kPi * (0.25 + 1.0);
    auto mms = [](double x, double y) {
        return std::cos(0.5 * kPi * x) * std::sin(kPi * y);
    };
    auto h = [&](double x1, double x2, double) { return lam * mms(x1, x2); };

    auto coarse = empty_field(1.0, 1.0, 64, 32);
    fill(coarse, mms);
    auto fine = empty_field(1.0, 1.0, 128, 64);
    fill(fine, mms);
    double rc = planar_residual(coarse, h);
    double rf = planar_residual(fine, h);
    CHECK(rc / rf == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("newton solve on the symmetric rectangle") {
    PlanarProblemSpec prob;
    prob.spec = power_spec(2.0, 5.0, 2);
    prob.n1 = 64;
    prob.n2 = 32;
    auto bundle = make_bundle(prob.spec, 20.0);
    auto field = solve_planar(prob, bundle);

    CHECK(field.converged);
    CHECK_FALSE(field.trivial);
    CHECK(field.warning.empty());
    CHECK(field.residual <= 1e-8);
    CHECK(field.max_abs_v() > 0.1);
    // recomputing through the public entry point reproduces the stored value
    CHECK(planar_residual(field, bundle) == doctest::Approx(field.residual).epsilon(1e-10));
    // the profile is mirror symmetric about x1 = 0 and positive inside
    auto reflected = reflect_field(field);
    double dev = 0.0;
    for (std::size_t t = 0; t < field.v.size(); ++t)
        dev = std::max(dev, std::abs(field.v[t] - reflected.v[t]));
    CHECK(dev <= 1e-9 * field.max_abs_v());
    for (int i = 1; i < field.n1; ++i)
        for (int j = 1; j < field.n2; ++j)
            CHECK(field.v[field.idx(i, j)] > 0.0);
    CHECK(field.residual_history.size() >= 2);
    CHECK(field.newton_iters >= 2);
}

TEST_CASE("seeds that collapse produce the labeled trivial run") {
    PlanarProblemSpec prob;
    prob.spec = power_spec(2.0, 5.0, 2);
    prob.n1 = 16;
    prob.n2 = 8;
    auto bundle = make_bundle(prob.spec, 20.0);
    PlanarControls ctl;
    ctl.seed_factors = {1e-9};
    auto field = solve_planar(prob, bundle, ctl);
    CHECK(field.trivial);
    CHECK(field.max_abs_v() <= 1e-7);
}

TEST_CASE("exponent pairs outside the verified window carry a warning") {
    PlanarProblemSpec prob;
    prob.spec = power_spec(2.0, 2.5, 2); // p <= k + 1
    prob.n1 = 16;
    prob.n2 = 8;
    auto bundle = make_bundle(prob.spec, 20.0);
    auto field = solve_planar(prob, bundle);
    CHECK_FALSE(field.warning.empty());
}

TEST_CASE("reflection produces an exact involution and split difference fields") {
    auto f = empty_field(1.0, 1.0, 16, 8);
    fill(f, [](double x, double y) { return (1.0 - x * x) * y * (1.0 - y) * (1.0 + 0.5 * x); });
    auto r = reflect_field(f);
    CHECK(r.v[r.idx(4, 3)] == f.v[f.idx(12, 3)]);
    auto rr = reflect_field(r);
    for (std::size_t t = 0; t < f.v.size(); ++t)
        CHECK(rr.v[t] == f.v[t]);

    auto bundle = make_bundle(power_spec(2.0, 5.0, 2), 20.0);
    auto rep = reflection_diagnostics(f, bundle, 9);
    // the difference field and its mirror reflection are exact negatives
    CHECK(rep.antisym_identity_error <= 1e-14);
    // energy decomposition across the two halves is exact for split fields
    CHECK(rep.decomposition_max_error <= 1e-12);
    // an asymmetric non-solution gets diagnostics but no inequality claims
    CHECK_FALSE(rep.solves_pde);
    CHECK_FALSE(rep.claims_enabled);
    CHECK(rep.t_grid.size() == 9);
    CHECK(rep.psi_plus_minus.size() == 9);
}

TEST_CASE("energy derivative formula matches a centered difference on solutions") {
    PlanarProblemSpec prob;
    prob.spec = power_spec(2.0, 5.0, 2);
    prob.n1 = 32;
    prob.n2 = 16;
    auto bundle = make_bundle(prob.spec, 20.0);
    auto field = solve_planar(prob, bundle);
    auto rep = reflection_diagnostics(field, bundle);

    CHECK(rep.solves_pde);
    CHECK(rep.claims_enabled);
    CHECK(rep.field_residual <= 1e-8);
    CHECK(rep.deriv_max_discrepancy <= std::max(1e-6, 10.0 * rep.field_residual));
    // for the symmetric solution every reflected-difference energy vanishes
    CHECK(rep.deriv_max_value <= 1e-8);
    CHECK(rep.grid13_max <= 1e-8);
    CHECK(rep.curve_order_max_violation <= 1e-8);
    CHECK(rep.growth_constant > 0.0);
    CHECK(rep.lipschitz_constant > 0.0);
    CHECK(rep.c1_fraction == doctest::Approx(1.0));
    CHECK(rep.c2_fraction == doctest::Approx(1.0));
}

TEST_CASE("symmetry metrics separate symmetric and asymmetric fields") {
    PlanarProblemSpec prob;
    prob.spec = power_spec(2.0, 5.0, 2);
    prob.n1 = 32;
    prob.n2 = 16;
    auto bundle = make_bundle(prob.spec, 20.0);
    auto field = solve_planar(prob, bundle);
    auto sym = symmetry_metrics(field);
    CHECK(sym.even_deviation <= 1e-9);
    CHECK(sym.critical_count >= 1);
    double best = 1e300;
    for (const auto &cp : sym.critical_points)
        best = std::min(best, cp.dist_to_axis);
    CHECK(best <= field.hx());
    CHECK(sym.dx1_axis_frac_nonneg >= 0.0);

    auto skew = empty_field(1.0, 1.0, 32, 16);
    fill(skew, [](double x, double y) {
        return (1.0 - x * x) * y * (1.0 - y) * (1.0 + 0.6 * x);
    });
    auto askew = symmetry_metrics(skew);
    CHECK(askew.even_deviation > 0.1);
    CHECK(askew.foliated_deviation >= 0.0);
}

TEST_CASE("rasterized radial profiles are mirror symmetric with tiny angular defect") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::ball(1.0);
    prob.spec = power_spec(2.0, 5.0);
    auto bundle = make_bundle(prob.spec, 20.0);
    RadialControls ctl;
    ctl.grid_points = 2001;
    auto sol = solve_radial(prob, bundle, ctl);
    auto raster = rasterize_radial(sol, bundle, 128);
    CHECK(raster.n1 == 128);
    auto sym = symmetry_metrics(raster);
    CHECK(sym.even_deviation == 0.0); // the raster is even in x1 by construction
    CHECK(sym.foliated_deviation <= 1e-3);
}

TEST_CASE("interpolation of the stored field") {
    auto f = empty_field(1.0, 1.0, 64, 64);
    fill(f, [](double x, double y) { return (1.0 - x * x) * y * (1.0 - y); });
    for (int i = 0; i <= f.n1; ++i)
        for (int j = 0; j <= f.n2; ++j)
            f.u[f.idx(i, j)] = f.v[f.idx(i, j)];
    CHECK(f.interp_u(0.33, 0.47) ==
          doctest::Approx((1.0 - 0.33 * 0.33) * 0.47 * (1.0 - 0.47)).epsilon(1e-3));
    CHECK(f.interp_u(5.0, 0.5) == 0.0); // clamped to the boundary value
}
