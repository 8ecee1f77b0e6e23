#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quasisym/radial.hpp"
#include "support.hpp"

#include <cmath>

using namespace quasisym;
using testsupport::constant_spec;
using testsupport::power_spec;

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc_profile(double r) { return r == 0.0 ? 1.0 : std::sin(r) / r; }
double sinc_slope(double r) {
    if (r == 0.0)
        return 0.0;
    return (r * std::cos(r) - std::sin(r)) / (r * r);
}

/// Analytic samples of sin(r)/r on a ball of radius pi (no integrator).
RadialSolution sampled_sinc(int points) {
    RadialSolution sol;
    sol.domain = RadialDomain::ball(kPi);
    sol.dim = 3;
    sol.shoot_param = 1.0;
    for (int i = 0; i < points; ++i) {
        double r = kPi * i / (points - 1);
        sol.r.push_back(r);
        sol.v.push_back(sinc_profile(r));
        sol.u.push_back(sol.v.back());
        sol.dv.push_back(sinc_slope(r));
    }
    sol.node_count = 0;
    return sol;
}

} // namespace

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(RadialDomain::ball(-1.0).validate(), usage_error);
    CHECK_THROWS_AS(RadialDomain::annulus(2.0, 1.0).validate(), usage_error);
    CHECK_THROWS_AS(RadialDomain::annulus(0.0, 1.0).validate(), usage_error);
    CHECK_NOTHROW(RadialDomain::annulus(1.0, 2.0).validate());
    CHECK_NOTHROW(RadialDomain::ball(3.0).validate());
}

TEST_CASE("linear override solve reproduces sin(r)/r on the pi ball") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::ball(kPi);
    prob.spec = constant_spec(1.0, 3.0);
    RadialControls ctl;
    ctl.grid_points = 2001;
    ctl.param_lo = 1.0; // pinned: v(0) = 1 makes the profile exactly sin(r)/r
    ctl.param_hi = 1.0;
    ctl.h_override = [](double, double v) { return v; };
    ctl.h1_override = [](double, double) { return 1.0; };
    auto bundle = make_bundle(prob.spec, 5.0);
    auto sol = solve_radial(prob, bundle, ctl);

    CHECK(std::abs(sol.v.back()) <= 1e-8); // boundary residual of the shot
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i)
        worst = std::max(worst, std::abs(sol.v[i] - sinc_profile(sol.r[i])));
    CHECK(worst <= 1e-6);
    CHECK(sol.node_count == 0);
}

TEST_CASE("analytic samples of the linear solution pass the residual check") {
    auto sol = sampled_sinc(10000);
    auto rep = residuals_custom(sol, [](double, double v) { return v; });
    CHECK(rep.semilinear <= 1e-8);
    CHECK(rep.quasilinear == 0.0); // custom form skips the divergence column
    CHECK(rep.points > 0);
}

TEST_CASE("zero profile has zero residuals in both forms") {
    auto bundle = make_bundle(power_spec(2.0, 5.0), 5.0);
    RadialSolution sol;
    sol.domain = RadialDomain::ball(1.0);
    sol.dim = 3;
    const int M = 400;
    for (int i = 0; i <= M; ++i) {
        sol.r.push_back(static_cast<double>(i) / M);
        sol.v.push_back(0.0);
        sol.u.push_back(0.0);
        sol.dv.push_back(0.0);
    }
    auto rep = residuals(sol, bundle);
    CHECK(rep.semilinear == 0.0);
    CHECK(rep.quasilinear == 0.0);
    CHECK(rep.semilinear_scale == 1.0);
    CHECK(rep.quasilinear_scale == 1.0);
}

TEST_CASE("unit-coefficient cubic ground state meets the residual and decay targets") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::ball(1.0);
    prob.spec = constant_spec(1.0, 3.0);
    auto bundle = make_bundle(prob.spec, 20.0);

    double prev = 0.0;
    double alpha = 0.0;
    for (int gi = 0; gi < 3; ++gi) {
        RadialControls ctl;
        ctl.grid_points = 2001 << gi; // 2001, 4001, 8001
        auto sol = solve_radial(prob, bundle, ctl);
        alpha = sol.shoot_param;
        for (double x : sol.v)
            CHECK(x >= -1e-12); // positive profile
        auto rep = residuals(sol, bundle);
        CHECK(rep.semilinear == doctest::Approx(rep.quasilinear).epsilon(1e-9));
        if (gi > 0) {
            CHECK(rep.semilinear <= 1e-6);
            CHECK(prev / rep.semilinear >= 3.9); // halves by ~4x per doubling
        }
        prev = rep.semilinear;
    }
    CHECK(alpha == doctest::Approx(6.89684861937).epsilon(1e-6));
}

TEST_CASE("quasi-linear ground state satisfies both residual forms") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::ball(1.0);
    prob.spec = power_spec(2.0, 5.0);
    auto bundle = make_bundle(prob.spec, 20.0);

    double prev_semi = 0.0, prev_quasi = 0.0, prev_ratio = 0.0;
    for (int gi = 0; gi < 2; ++gi) {
        RadialControls ctl;
        ctl.grid_points = 4001 << gi;
        auto sol = solve_radial(prob, bundle, ctl);
        CHECK(sol.polished);
        auto rep = residuals(sol, bundle);
        CHECK(rep.semilinear <= 1e-5);
        CHECK(rep.quasilinear <= 1e-5);
        double ratio = rep.quasilinear_abs / rep.semilinear_abs;
        if (gi > 0) {
            CHECK(rep.semilinear < prev_semi); // both decrease under doubling
            CHECK(rep.quasilinear < prev_quasi);
            // the two forms track each other: the ratio stays bounded
            CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.2));
        }
        prev_semi = rep.semilinear;
        prev_quasi = rep.quasilinear;
        prev_ratio = ratio;
        CHECK(sol.shoot_param == doctest::Approx(9.42190586161).epsilon(1e-6));
    }
}

TEST_CASE("node targeting finds the sign-changing profile") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::ball(1.0);
    prob.spec = power_spec(2.0, 5.0);
    prob.spec.sign = SourceSign::OddPower;
    prob.target_nodes = 1;
    auto bundle = make_bundle(prob.spec, 80.0);
    RadialControls ctl;
    ctl.grid_points = 4001;
    auto sol = solve_radial(prob, bundle, ctl);
    CHECK(sol.node_count == 1);
    CHECK(sol.shoot_param > 9.43); // above the ground-state amplitude
    auto rep = residuals(sol, bundle);
    CHECK(rep.semilinear <= 1e-5);
    CHECK(rep.quasilinear <= 1e-5);
}

TEST_CASE("annulus solve shoots on the inner slope") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::annulus(1.0, 2.0);
    prob.spec = power_spec(2.0, 5.0);
    // the inner slope needed here (~23.8) outruns the default amplitude cap
    auto bundle = make_bundle(prob.spec, 40.0);
    RadialControls ctl;
    ctl.grid_points = 4001;
    auto sol = solve_radial(prob, bundle, ctl);
    CHECK(sol.v.front() == 0.0);
    CHECK(sol.node_count == 0);
    CHECK(sol.shoot_param > 0.0);
    auto rep = residuals(sol, bundle);
    CHECK(rep.semilinear <= 1e-5);
    CHECK(rep.quasilinear <= 1e-5);
}

TEST_CASE("solver error surfaces") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::ball(1.0);
    prob.spec = power_spec(2.0, 5.0);
    auto bundle = make_bundle(prob.spec, 20.0);

    // a fixed bracket that straddles no boundary-value sign change
    RadialControls narrow;
    narrow.grid_points = 501;
    narrow.param_lo = 1e-3;
    narrow.param_hi = 2e-3;
    CHECK_THROWS_AS(solve_radial(prob, bundle, narrow), convergence_error);

    RadialControls badgrid;
    badgrid.grid_points = 3;
    CHECK_THROWS_AS(solve_radial(prob, bundle, badgrid), usage_error);

    RadialSolution tiny;
    tiny.domain = RadialDomain::ball(1.0);
    tiny.dim = 3;
    tiny.r = {0.0, 0.5, 1.0};
    tiny.v = {1.0, 0.5, 0.0};
    tiny.u = tiny.v;
    tiny.dv = {0.0, -1.0, -1.0};
    CHECK_THROWS_AS(residuals(tiny, bundle), usage_error);
}

TEST_CASE("hermite sampling of the stored profile") {
    auto sol = sampled_sinc(2001);
    for (double r : {0.1234, 1.0, 2.51, 3.0}) {
        CHECK(sol.sample(r) == doctest::Approx(sinc_profile(r)).epsilon(1e-10));
        CHECK(sol.sample_slope(r) == doctest::Approx(sinc_slope(r)).epsilon(1e-6));
    }
}
