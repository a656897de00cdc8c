#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <hslog/analysis.hpp>
#include <hslog/bliss.hpp>

using namespace hslog;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ParamSet P0 = validate_params(2, 2, 2, 2);
const ParamSet P1 = validate_params(3, 2, 4, 4);
const DerivedConstants D0 = derived_constants(P0);
const DerivedConstants D1 = derived_constants(P1);
const double kE = std::exp(1.0);

}  // namespace

TEST_CASE("bliss profile values", "[bliss]") {
    CHECK_THAT(bliss_value(1.0, 0.0, D0), WithinRel(std::pow(3.0, 0.25), 1e-14));
    CHECK_THAT(bliss_value(1.0, 1.0, D0), WithinRel(0.930604859102100, 1e-14));
    CHECK(bliss_derivative(0.3, 0.0, D0) == 0.0);
    const double h = 1e-6;
    for (double r : {0.01, 0.2, 0.7}) {
        const double fd = (bliss_value(0.1, r + h, D1) - bliss_value(0.1, r - h, D1)) / (2.0 * h);
        CHECK_THAT(bliss_derivative(0.1, r, D1), WithinRel(fd, 1e-7));
    }
}

TEST_CASE("bliss scaling law", "[bliss]") {
    for (const DerivedConstants* dc : {&D0, &D1}) {
        const double k = dc->s - dc->n / dc->m;
        for (double eps : {1e-1, 1e-3}) {
            for (double r : {1e-4, 0.05, 0.6}) {
                CHECK_THAT(bliss_value(eps, r, *dc),
                           WithinRel(std::pow(eps, k) * bliss_value(1.0, r / eps, *dc), 1e-12));
            }
        }
    }
}

TEST_CASE("cut-off bubble", "[bliss]") {
    const Grid g = make_grid(2000, 3);
    const BubbleSpec b{1e-3, 1.3, 0.2};
    const Profile u = bubble_profile(b, g, D0);
    CHECK(u[g.size() - 1] == 0.0);
    for (std::size_t i = 0; i < g.size() && g.r(i) <= 0.2; i += 50) {
        CHECK(u[i] == 1.3 * bliss_value(1e-3, g.r(i), D0));
    }
    for (double r : {0.25, 0.3, 0.35}) CHECK(cutoff(r, 0.2) >= 0.0);
    CHECK_THROWS_AS(bubble_profile(BubbleSpec{1e-3, 1.0, 0.6}, g, D0), ValidationError);
    CHECK_THROWS_AS(bubble_profile(BubbleSpec{1e-9, 1.0, 0.2}, make_grid(100, 1), D0), ValidationError);

    const ConstantsReport cr = compute_S(D0);
    const double A = normalized_A_hat(cr, D0);
    const Grid gf = make_grid(4000, 3);
    for (double eps : {1e-3, 1e-4}) {
        const double n = dirichlet_energy(bubble_profile(BubbleSpec{eps, A, 0.2}, gf, D0), P0);
        CHECK(std::abs(n - 1.0) < 50.0 * eps);
    }
}

TEST_CASE("best constants", "[bliss]") {
    const ConstantsReport c0 = compute_S(D0);
    CHECK_THAT(c0.S_power, WithinRel(1.02026214238175, 1e-10));
    CHECK_THAT(c0.sigma_p, WithinRel(0.960674926386610, 1e-10));
    CHECK_THAT(c0.p_star_integral, WithinRel(c0.gradient_integral, 1e-10));
    CHECK_THAT(mp_threshold(c0, D0), WithinRel(0.340087380793916, 1e-10));

    const ConstantsReport c1 = compute_S(D1);
    CHECK_THAT(c1.S_power, WithinRel(1.01852045547491, 1e-10));
    CHECK_THAT(c1.sigma_p, WithinRel(0.972848842753454, 1e-10));
    CHECK_THAT(mp_threshold(c1, D1), WithinRel(0.203704091094982, 1e-10));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double p = 1.3 + 2.5 * U(rng);
        const double a1 = p - 1.0 + 0.2 + 3.0 * U(rng);
        const double th = std::max(0.0, a1 - p) + 0.2 + 4.0 * U(rng);
        const DerivedConstants dc = derived_constants(validate_params(p, a1, a1, th));
        const ConstantsReport c = compute_S(dc);
        INFO("p=" << p << " a1=" << a1 << " th=" << th);
        CHECK_THAT(c.p_star_integral, WithinRel(c.gradient_integral, 1e-6));
        CHECK_THAT(c.sigma_p, WithinRel(std::pow(c.S, -dc.p_star / p), 1e-14));
    }
}

TEST_CASE("crossing radii", "[bliss]") {
    const double A = std::pow(3.0, 0.25);
    const CrossingRadii one = crossing_radii(1e-4, 1.0, 1.0, A, D0);
    REQUIRE(one.a_eps);
    CHECK_FALSE(one.b_eps);
    CHECK_THAT(*one.a_eps, WithinRel(0.00765859136679621, 1e-10));

    const CrossingRadii tenth = crossing_radii(1e-4, 0.1, 1.0, A, D0);
    REQUIRE(tenth.a_eps);
    REQUIRE(tenth.b_eps);
    CHECK_THAT(*tenth.a_eps, WithinRel(0.00502548474349211, 1e-10));
    CHECK_THAT(*tenth.b_eps, WithinRel(0.0491292381724781, 1e-10));
    CHECK(*tenth.a_eps < *tenth.b_eps);

    // At a_ε the amplitude t·A·ε^s/(ε^n + r^n)^{1/m} sits exactly on e − τ.
    const double eps = 1e-4;
    const double level = A * std::pow(eps, D0.s) * std::pow(std::pow(eps, D0.n) + std::pow(*one.a_eps, D0.n), -1.0 / D0.m);
    CHECK_THAT(std::abs(std::log(1.0 + level)), WithinAbs(1.0, 1e-12));

    double prev = 0.0;
    for (double e : {1e-4, 1e-6, 1e-8, 1e-10}) {
        const double ratio = *crossing_radii(e, 1.0, 1.0, A, D0).a_eps / std::pow(e, 1.0 / P0.p);
        if (prev > 0.0) CHECK_THAT(ratio, WithinRel(prev, 1e-2));
        prev = ratio;
    }
    CHECK_THROWS_AS(crossing_radii(1e-4, 3.0, 1.0, A, D0), ValidationError);
}

TEST_CASE("concentration integral", "[bliss]") {
    const Grid g = make_grid(2000, 3);
    const LogParams lp = make_log_params(1.0, 0.5);
    const Profile u = bubble_profile(BubbleSpec{1e-3, 1.0, 0.2}, g, D0);
    const double whole = concentration_E(0.0, 1.0, u, 1.0, lp, P0);
    const double split = concentration_E(0.0, 0.013, u, 1.0, lp, P0) + concentration_E(0.013, 0.4, u, 1.0, lp, P0) +
                         concentration_E(0.4, 1.0, u, 1.0, lp, P0);
    CHECK_THAT(split, WithinRel(whole, 1e-12));

    const Profile z = Profile::sample(g, [](double) { return 0.0; });
    CHECK(concentration_E(0.0, 1.0, z, 1.0, lp, P0) == 0.0);
    const Profile flat = Profile::sample(g, [](double) { return kE - 1.0; });
    CHECK_THAT(concentration_E(0.1, 0.9, flat, 1.0, lp, P0), WithinAbs(0.0, 1e-12));
    LogParams off = lp;
    off.log_off = true;
    CHECK(concentration_E(0.0, 1.0, u, 1.0, off, P0) == 0.0);
    CHECK_THROWS_AS(concentration_E(0.5, 0.5, u, 1.0, lp, P0), ValidationError);
}

TEST_CASE("bubble norm deviations are finite and shrink", "[bliss]") {
    const Grid g = make_grid(2000, 3);
    for (const DerivedConstants* dc : {&D0, &D1}) {
        const BubbleNormScan s = bubble_norm_deviations({1e-2, 1e-3, 1e-4}, 0.2, g, *dc);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::isfinite(s.dirichlet_deviation[i]));
            CHECK(std::isfinite(s.lpstar_deviation[i]));
            CHECK(s.lpstar_deviation[i] < 0.0);
        }
        CHECK(std::abs(s.dirichlet_deviation[2]) < std::abs(s.dirichlet_deviation[0]));
        CHECK(std::abs(s.lpstar_deviation[2]) < std::abs(s.lpstar_deviation[0]));
    }
}
