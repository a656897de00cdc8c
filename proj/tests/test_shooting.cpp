#include <catch_amalgamated.hpp>

#include <cmath>

#include <hslog/analysis.hpp>
#include <hslog/shooting.hpp>

using namespace hslog;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ParamSet P0 = validate_params(2, 2, 2, 2);
const LogParams kLp = make_log_params(1.0, 0.5);

ShootResult solve(const Grid& g, double tol = 1e-10, const IvpOptions& opt = {}) {
    const auto br = scan_bracket(kLp, P0, g, 1e-2, 1e4, 61, opt);
    REQUIRE(br);
    return shoot(kLp, P0, *br, tol, g, opt);
}

}  // namespace

TEST_CASE("zero amplitude is a fixed point", "[shooting]") {
    const Grid g = make_grid(200, 2);
    const IvpResult r = ivp_integrate(0.0, kLp, P0, g);
    CHECK(r.ok);
    for (double x : r.profile.values()) CHECK(x == 0.0);
    CHECK(weak_residual(r.profile, kLp, P0) == 0.0);
    CHECK_THROWS_AS(ivp_integrate(1.0, kLp, P0, g, IvpOptions{1e-2}), ValidationError);
    CHECK_THROWS_AS(ivp_integrate(1.0, make_log_params(0.5, 0.5), P0, g), ValidationError);
}

TEST_CASE("positive solution of the boundary value problem", "[shooting]") {
    const Grid g = make_grid(2000, 3);
    const ShootResult s = solve(g);
    CHECK(s.boundary_residual < 1e-8);
    CHECK(s.positive);
    CHECK(s.weak_residual < 1e-4);
    // Amplitude pinned from this solver at M = 2000, gamma = 3.
    CHECK_THAT(s.amplitude, WithinRel(23.1969640489, 1e-8));

    SECTION("halving the tolerance leaves the amplitude in place") {
        const ShootResult t = solve(g, 5e-11);
        CHECK_THAT(t.amplitude, WithinRel(s.amplitude, 1e-9));
    }
    SECTION("the start radius does not matter") {
        const ShootResult t = solve(g, 1e-10, IvpOptions{1e-7});
        CHECK_THAT(t.amplitude, WithinRel(s.amplitude, 1e-8));
    }
    SECTION("energy is consistent with a critical point") {
        const double D = dirichlet_energy(s.profile, P0);
        CHECK(std::abs(energy_pairing(s.profile, s.profile, kLp, P0)) < 1e-4 * D);
        const double I = energy_I(s.profile, kLp, P0);
        const double threshold = mp_threshold(compute_S(derived_constants(P0)), derived_constants(P0));
        CHECK(I > 0.0);
        CHECK(I < threshold);
        CHECK(energy_I(s.profile.scaled(1.1), kLp, P0) < I);
        CHECK(energy_I(s.profile.scaled(0.9), kLp, P0) < I);
    }
}

TEST_CASE("weak residual separates solutions from other profiles", "[shooting]") {
    const Grid g = make_grid(2000, 3);
    const Profile u = Profile::sample(g, [](double r) { return 5.0 * (1.0 - r * r) * (1.0 + std::sin(7.0 * r)); });
    CHECK(weak_residual(u, kLp, P0) > 1e-2);
    CHECK_THROWS_AS(weak_residual(u, kLp, P0, 1), ValidationError);
}

TEST_CASE("a bracket without a sign change is rejected", "[shooting]") {
    const Grid g = make_grid(400, 2);
    CHECK_THROWS_WITH(shoot(kLp, P0, {0.0, 1e-6}, 1e-10, g), ContainsSubstring("no sign change"));
    CHECK_THROWS_AS(shoot(kLp, P0, {2.0, 1.0}, 1e-10, g), ValidationError);
    CHECK_FALSE(scan_bracket(kLp, P0, g, 1e-3, 1e-2, 5));
}
