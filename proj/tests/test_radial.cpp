#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <sstream>

#include <hslog/radial.hpp>

using namespace hslog;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ParamSet P0 = validate_params(2, 2, 2, 2);

Profile one_minus_r(const Grid& g) {
    return Profile::sample(g, [](double r) { return 1.0 - r; });
}

double sixth_power_integral(int M, double gamma) {
    const Grid g = make_grid(M, gamma);
    return weighted_integral(g, 2.0, [](const QuadPoint& q) { return std::pow(1.0 - q.r, 6); });
}

}  // namespace

TEST_CASE("grid nodes follow (i/M)^gamma", "[radial]") {
    const Grid u = make_grid(4, 1);
    REQUIRE(u.size() == 4);
    CHECK(u.nodes() == std::vector<double>{0.25, 0.5, 0.75, 1.0});
    const Grid s = make_grid(4, 2);
    CHECK(s.nodes() == std::vector<double>{0.0625, 0.25, 0.5625, 1.0});
    const Grid big = make_grid(2000, 3);
    CHECK(big.size() == 2000);
    CHECK_THAT(big.r(0), WithinRel(std::pow(1.0 / 2000.0, 3), 1e-14));
    CHECK(big.r(1999) == 1.0);
    CHECK_THROWS_AS(make_grid(1, 2), ValidationError);
    CHECK_THROWS_AS(make_grid(10, 0.5), ValidationError);
}

TEST_CASE("weighted integrals against closed forms", "[radial]") {
    const Grid g = make_grid(2000, 3);
    CHECK_THAT(weighted_integral(g, 2.0, [](const QuadPoint&) { return 1.0; }), WithinAbs(1.0 / 3.0, 1e-12));
    CHECK_THAT(sixth_power_integral(2000, 3), WithinAbs(1.0 / 252.0, 1e-8));
    CHECK(weighted_integral(g, 2.0, [](const QuadPoint&) { return 0.0; }) == 0.0);
    CHECK_THROWS_AS(weighted_integral(g, -1.0, [](const QuadPoint&) { return 1.0; }), ValidationError);
}

TEST_CASE("norms of 1 - r", "[radial]") {
    const Grid g = make_grid(2000, 3);
    const Profile u = one_minus_r(g);
    CHECK_THAT(dirichlet_norm(u, P0), WithinAbs(0.577350269189626, 1e-9));
    CHECK_THAT(lq_norm(u, 6.0, 2.0), WithinAbs(0.397893254444161, 1e-8));
    const Profile z = Profile::sample(g, [](double) { return 0.0; });
    CHECK(dirichlet_norm(z, P0) == 0.0);
    CHECK(lq_norm(z, 6.0, 2.0) == 0.0);
    CHECK_THAT(dirichlet_norm(u.scaled(2.0), P0), WithinRel(2.0 * dirichlet_norm(u, P0), 1e-14));
}

// On a uniform grid the only error is the flat first cell [0, 1/M]: O(M^-4) for
// the weighted integrals of 1 - r and O(M^-3) for the missing Dirichlet energy.
TEST_CASE("integrals of 1 - r converge at the first-cell order", "[radial]") {
    auto errors = [](int M) {
        const Grid g = make_grid(M, 1);
        const Profile u = one_minus_r(g);
        return std::array<double, 3>{std::abs(sixth_power_integral(M, 1) - 1.0 / 252.0),
                                     std::abs(lq_norm(u, 6.0, 2.0) - 0.397893254444161),
                                     std::abs(dirichlet_norm(u, P0) - 0.577350269189626)};
    };
    const std::array<double, 3> expected{4.0, 4.0, 3.0};
    const auto e100 = errors(100), e200 = errors(200), e400 = errors(400);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK_THAT(std::log2(e100[k] / e200[k]), WithinAbs(expected[k], 0.2));
        CHECK_THAT(std::log2(e200[k] / e400[k]), WithinAbs(expected[k], 0.2));
    }
}

TEST_CASE("pointwise bound", "[radial]") {
    const Grid g = make_grid(2000, 3);
    const Profile u = one_minus_r(g);
    const double nrm = dirichlet_norm(u, P0);
    CHECK_THAT(pointwise_bound(0.5, nrm, P0), WithinAbs(0.577350269189626, 1e-9));
    CHECK(pointwise_bound_check(u, P0).pass);
    CHECK(pointwise_bound_check(normalize(u, P0), P0).pass);
    const Profile z = Profile::sample(g, [](double) { return 0.0; });
    const auto rep = pointwise_bound_check(z, P0);
    CHECK(rep.pass);
    CHECK(rep.worst_slack == 0.0);
}

TEST_CASE("normalize", "[radial]") {
    const Grid g = make_grid(2000, 3);
    const Profile u = one_minus_r(g);
    const Profile v = normalize(u, P0);
    CHECK_THAT(v[100] / u[100], WithinRel(std::sqrt(3.0), 1e-9));
    CHECK_THAT(dirichlet_norm(v, P0), WithinAbs(1.0, 1e-14));
    const Profile w = normalize(v, P0);
    for (std::size_t i = 0; i < v.size(); i += 97) CHECK_THAT(w[i], WithinAbs(v[i], 1e-14));
    CHECK_THROWS_AS(normalize(Profile::sample(g, [](double) { return 0.0; }), P0), ValidationError);
}

TEST_CASE("profile CSV round trip", "[radial]") {
    const Grid g = make_grid(50, 2);
    const Profile u = Profile::sample(g, [](double r) { return std::cos(3.0 * r) * (1.0 - r); });
    std::ostringstream os;
    write_profile_csv(os, u);
    std::istringstream is(os.str());
    const Profile v = read_profile_csv(is);
    REQUIRE(v.size() == u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK_THAT(v.grid().r(i), WithinRel(g.r(i), 1e-11));
        CHECK_THAT(v[i], WithinAbs(u[i], 1e-11));
    }
    std::istringstream bad("x,y\n0.5,1\n");
    CHECK_THROWS_AS(read_profile_csv(bad), ValidationError);
    std::istringstream junk("r,u\n0.5,abc\n");
    CHECK_THROWS_AS(read_profile_csv(junk), ValidationError);
}
