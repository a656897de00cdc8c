#include <catch_amalgamated.hpp>

#include <cmath>

#include <hslog/functionals.hpp>

using namespace hslog;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ParamSet P0 = validate_params(2, 2, 2, 2);
const double kE = std::exp(1.0);

Profile one_minus_r(const Grid& g) {
    return Profile::sample(g, [](double r) { return 1.0 - r; });
}

// Composite Simpson on [0,u] with n (even) panels.
double simpson(auto&& f, double u, int n) {
    const double h = u / n;
    double acc = f(0.0) + f(u);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("log factor special values", "[functionals]") {
    const LogParams lp = make_log_params(1.0, 1.0);
    CHECK(log_factor(0.0, 3.7, lp) == 1.0);
    CHECK_THAT(log_factor(0.5, kE - 1.0, lp), WithinAbs(1.0, 1e-15));
    CHECK(log_factor(0.5, 0.0, lp) == 0.0);
    LogParams off = lp;
    off.log_off = true;
    CHECK(log_factor(0.5, 0.0, off) == 1.0);
    CHECK_THROWS_AS(make_log_params(0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(make_log_params(1.0, -1.0), ValidationError);
}

TEST_CASE("J basics", "[functionals]") {
    const Grid g = make_grid(2000, 3);
    const Profile z = Profile::sample(g, [](double) { return 0.0; });
    CHECK(J(z, make_log_params(1.0, 0.5), P0) == 0.0);
    CHECK(sobolev_J0(z, P0) == 0.0);

    const Profile u = one_minus_r(g);
    CHECK_THAT(sobolev_J0(u, P0), WithinAbs(1.0 / 252.0, 1e-8));
    LogParams off = make_log_params(1.0, 0.5);
    off.log_off = true;
    CHECK(J(u, off, P0) == sobolev_J0(u, P0));
}

TEST_CASE("J is nondecreasing in tau", "[functionals]") {
    const Grid g = make_grid(400, 2);
    const Profile u = Profile::sample(g, [](double r) { return 3.0 * (1.0 - r * r); });
    double prev = 0.0;
    for (double tau : {1.0, 1.5, kE, 5.0, 10.0}) {
        const double v = J(u, make_log_params(tau, 0.5), P0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("J_phi with phi = r^beta equals J", "[functionals]") {
    const Grid g = make_grid(500, 3);
    const Profile u = Profile::sample(g, [](double r) { return 2.0 * std::cos(1.4 * r) * (1.0 - r); });
    HypothesisSet hs;
    hs.phi = [](double r) { return std::pow(r, 0.5); };
    for (double tau : {1.0, 2.0}) {
        CHECK_THAT(J_phi(u, tau, hs, P0), WithinRel(J(u, make_log_params(tau, 0.5), P0), 1e-12));
    }
    CHECK(J_phi(Profile::sample(g, [](double) { return 0.0; }), 1.0, hs, P0) == 0.0);
}

TEST_CASE("hypothesis checks", "[functionals]") {
    HypothesisSet power;
    power.phi = [](double r) { return std::pow(r, 0.5); };
    const HReport ok = check_h_conditions(power);
    CHECK(ok.h1);
    CHECK(ok.h2);
    CHECK(ok.h3);

    HypothesisSet edge;
    edge.phi = [](double r) { return r == 0.0 ? 0.0 : std::abs(std::log1p(-r)); };
    const HReport e = check_h_conditions(edge);
    CHECK_FALSE(e.h3);
    for (const auto& [k, ratio] : e.h3_ratios) CHECK_THAT(ratio, WithinAbs(1.0, 1e-12));

    HypothesisSet inv;
    inv.phi = [](double r) { return r == 0.0 ? 0.0 : 1.0 / std::abs(std::log(r)); };
    inv.sigma = 1.5;
    const HReport i = check_h_conditions(inv);
    CHECK(i.h1);
    CHECK_FALSE(i.h2);
    CHECK(i.h2_max > 1.0);

    HypothesisSet bad = power;
    bad.sigma = 1.0;
    CHECK_THROWS_AS(check_h_conditions(bad), ValidationError);
}

TEST_CASE("nonlinearity g and its primitive", "[functionals]") {
    const LogParams lp = make_log_params(1.0, 0.5);
    CHECK(g_eval(0.0, 2.0, lp, P0) == 0.0);
    CHECK(g_eval(0.3, 0.0, lp, P0) == 0.0);
    CHECK(G_eval(0.0, 2.0, lp, P0) == 0.0);
    CHECK(G_eval(0.3, 0.0, lp, P0) == 0.0);
    CHECK_THAT(g_eval(0.3, -1.5, lp, P0), WithinRel(-g_eval(0.3, 1.5, lp, P0), 1e-15));
    CHECK_THAT(G_eval(0.3, -1.5, lp, P0), WithinRel(G_eval(0.3, 1.5, lp, P0), 1e-15));

    const LogParams lp2 = make_log_params(2.0, 1.0);
    for (double r : {0.1, 0.5, 0.9}) {
        for (double u : {0.3, 1.0, 4.0}) {
            const double ref = simpson([&](double s) { return g_eval(r, s, lp2, P0); }, u, 4000);
            CHECK_THAT(G_eval(r, u, lp2, P0), WithinRel(ref, 1e-9));
        }
    }
    CHECK_THROWS_AS(g_eval(0.5, 1.0, make_log_params(0.5, 1.0), P0), ValidationError);
}

TEST_CASE("energy functional", "[functionals]") {
    const LogParams lp = make_log_params(1.0, 0.5);
    const Grid g = make_grid(20000, 1);
    CHECK(energy_I(Profile::sample(g, [](double) { return 0.0; }), lp, P0) == 0.0);
    // Independent nested adaptive quadrature of the same energy for u = 1 - r.
    CHECK_THAT(energy_I(one_minus_r(g), lp, P0), WithinAbs(0.166231477842590, 1e-8));

    const Grid gc = make_grid(400, 2);
    const Profile u = Profile::sample(gc, [](double r) { return 1.0 - r * r; });
    const double i3 = energy_I(u.scaled(1e3), lp, P0);
    const double i4 = energy_I(u.scaled(1e4), lp, P0);
    CHECK(i3 < 0.0);
    CHECK(i4 < i3);
}

TEST_CASE("pairing is the derivative of the energy", "[functionals]") {
    const LogParams lp = make_log_params(1.5, 0.7);
    const Grid g = make_grid(300, 2);
    const Profile u = Profile::sample(g, [](double r) { return 1.7 * (1.0 - r * r) * (1.0 + 0.3 * r); });
    const Profile v = Profile::sample(g, [](double r) { return std::sin(M_PI * r) + 0.5 * (1.0 - r); });
    const double h = 1e-4;
    const double fd = (energy_I(u.plus(v, h), lp, P0) - energy_I(u.plus(v, -h), lp, P0)) / (2.0 * h);
    CHECK_THAT(energy_pairing(u, v, lp, P0), WithinRel(fd, 1e-7));

    const Profile w = Profile::sample(g, [](double r) { return r * (1.0 - r); });
    CHECK_THAT(energy_pairing(u, v.plus(w), lp, P0),
               WithinAbs(energy_pairing(u, v, lp, P0) + energy_pairing(u, w, lp, P0), 1e-12));

    const Profile z = Profile::sample(g, [](double) { return 0.0; });
    CHECK(energy_pairing(z, v, lp, P0) == 0.0);
}
