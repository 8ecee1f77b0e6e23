#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quasisym/radial.hpp"
#include "support.hpp"

#include <cmath>

using namespace quasisym;
using testsupport::power_spec;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("spherical-harmonic multiplicities") {
    CHECK(mode_multiplicity(2, 0) == 1);
    CHECK(mode_multiplicity(2, 1) == 2);
    CHECK(mode_multiplicity(2, 5) == 2);
    CHECK(mode_multiplicity(3, 0) == 1);
    CHECK(mode_multiplicity(3, 1) == 3);
    CHECK(mode_multiplicity(3, 2) == 5);
    CHECK(mode_multiplicity(3, 3) == 7);
    CHECK(mode_multiplicity(4, 2) == 9);
    CHECK_THROWS_AS(mode_multiplicity(1, 0), usage_error);
}

TEST_CASE("zero potential is positive definite") {
    auto rep = morse_spectrum(RadialDomain::ball(kPi), 3, [](double) { return 0.0; }, 3, 2001);
    CHECK(rep.index == 0);
    for (const auto &m : rep.modes) {
        CHECK(m.negatives == 0);
        CHECK(m.lambda_min > 0.0);
    }
    CHECK_FALSE(rep.truncated);
}

TEST_CASE("constant potential on the pi ball counts one unstable direction") {
    // Dirichlet spectrum of the radial mode on the pi ball starts at 1, 4, 9;
    // the first l = 1 level is (j_{3/2,1}/pi)^2 with j_{3/2,1} = 4.49340946,
    // which is 2.0458 > 2. Shifting by -2 therefore leaves exactly one
    // negative eigenvalue, in the radial mode.
    auto rep = morse_spectrum(RadialDomain::ball(kPi), 3, [](double) { return 2.0; }, 3, 3001);
    CHECK(rep.index == 1);
    REQUIRE(rep.modes.size() >= 2);
    CHECK(rep.modes[0].negatives == 1);
    CHECK(rep.modes[1].negatives == 0);

    const double j32 = 4.493409457909064; // first zero of the l = 1 radial part
    double expected_l0 = 1.0 - 2.0;
    double expected_l1 = (j32 / kPi) * (j32 / kPi) - 2.0;
    CHECK(rep.modes[0].lambda_min == doctest::Approx(expected_l0).epsilon(1e-5));
    CHECK(rep.modes[1].lambda_min == doctest::Approx(expected_l1).epsilon(1e-3));
}

TEST_CASE("mode counts are grid independent for the quasi-linear ground state") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::ball(kPi);
    prob.spec = power_spec(2.0, 5.0);
    auto bundle = make_bundle(prob.spec, 20.0);
    RadialControls ctl;
    ctl.grid_points = 4001;
    auto sol = solve_radial(prob, bundle, ctl);

    auto coarse = morse_index(sol, bundle, -1, 2000);
    auto fine = morse_index(sol, bundle, -1, 4000);
    CHECK(coarse.index == fine.index);
    REQUIRE(coarse.modes.size() == fine.modes.size());
    for (std::size_t i = 0; i < coarse.modes.size(); ++i) {
        CHECK(coarse.modes[i].l == fine.modes[i].l);
        CHECK(coarse.modes[i].negatives == fine.modes[i].negatives);
        CHECK(coarse.modes[i].multiplicity == fine.modes[i].multiplicity);
    }
    CHECK(coarse.index >= 1); // the ground state is unstable in the radial mode
}

TEST_CASE("explicit mode cap flags possible undercounting") {
    // with l_max = 0 the scan cannot certify the tail is empty unless the
    // l = 0 block itself is empty
    auto rep = morse_spectrum(RadialDomain::ball(kPi), 3, [](double) { return 12.0; }, 0, 1201);
    CHECK(rep.modes.size() == 1);
    CHECK(rep.modes[0].negatives > 0);
    CHECK(rep.truncated);

    auto full = morse_spectrum(RadialDomain::ball(kPi), 3, [](double) { return 12.0; }, -1, 1201);
    CHECK_FALSE(full.truncated);
    CHECK(full.index > rep.modes[0].negatives); // higher modes contribute
}

TEST_CASE("annulus spectrum uses value conditions at both ends") {
    // -w'' with Dirichlet ends on (1, 2) has spectrum pi^2 n^2 ~ 9.87, 39.5;
    // in dimension 2 the l = 0 operator adds the -w'/r drift, which only
    // shifts levels slightly; a -11 shift leaves one negative radial level.
    auto rep = morse_spectrum(RadialDomain::annulus(1.0, 2.0), 2,
                              [](double) { return 11.0; }, -1, 2001);
    CHECK(rep.modes[0].negatives == 1);
    CHECK(rep.index >= 1);
}

TEST_CASE("nodal-zone count against the index bound") {
    RadialProblemSpec prob;
    prob.domain = RadialDomain::ball(1.0);
    prob.spec = power_spec(2.0, 5.0);
    auto bundle = make_bundle(prob.spec, 20.0);
    RadialControls ctl;
    ctl.grid_points = 4001;
    auto sol = solve_radial(prob, bundle, ctl);
    auto morse = morse_index(sol, bundle, -1, 2001);
    auto nodal = nodal_report(sol, morse, 3);
    CHECK(nodal.nod == 1);
    CHECK(nodal.morse == morse.index);
    CHECK(nodal.bound == doctest::Approx(1.0 + morse.index / 4.0));
    CHECK(nodal.satisfied);

    CHECK_THROWS_AS(nodal_report(sol, morse, 1), usage_error);
}

TEST_CASE("sign-changing profile keeps the bound with room for its extra zone") {
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
    auto morse = morse_index(sol, bundle, -1, 2001);
    auto nodal = nodal_report(sol, morse, 3);
    CHECK(nodal.nod == 2);
    CHECK(nodal.bound >= 2.0); // the index must reach at least 4 for two zones
    CHECK(nodal.satisfied);
}

TEST_CASE("morse spectrum input validation") {
    CHECK_THROWS_AS(morse_spectrum(RadialDomain::ball(1.0), 1, [](double) { return 0.0; }, 2, 101),
                    usage_error);
    CHECK_THROWS_AS(morse_spectrum(RadialDomain::ball(1.0), 3, [](double) { return 0.0; }, 2, 4),
                    usage_error);
}
