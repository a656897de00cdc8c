#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "errors.hpp"
#include "functionals.hpp"
#include "params.hpp"
#include "quadrature.hpp"
#include "radial.hpp"

namespace hslog {

struct IvpState {
    double r = 0.0;
    double u = 0.0;
    double w = 0.0;  // flux r^{α1}|u'|^{p-2}u'
};

// u' recovered from the flux.
inline double slope_from_flux(double r, double w, const ParamSet& ps) {
    if (w == 0.0) return 0.0;
    const double m = std::pow(std::abs(w) * std::pow(r, -ps.alpha1), 1.0 / (ps.p - 1.0));
    return w > 0.0 ? m : -m;
}

struct IvpResult {
    Profile profile;  // on the requested grid; nodes below r_min use the origin series
    double u_end = 0.0;
    double w_end = 0.0;
    std::size_t steps = 0;
    bool ok = true;
    std::string failure;
    IvpState last_good;
};

struct IvpOptions {
    double r_min = 1e-6;
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
};

namespace detail {

// (u, w) as functions of x = ln r.
struct FluxSystem {
    ParamSet ps;
    LogParams lp;
    double p_star;
    void operator()(const std::array<double, 2>& y, std::array<double, 2>& dy, double x) const {
        const double r = std::exp(x);
        dy[0] = r * slope_from_flux(r, y[1], ps);
        dy[1] = -r * std::pow(r, ps.theta) * source_term(r, y[0], lp, p_star);
    }
};

}  // namespace detail

// Integrates Lu = ln(τ+|u|)^{r^β}|u|^{p*-2}u outward from the origin with
// u(0) = amplitude and vanishing flux, and samples the solution at the grid
// nodes. The series covers (0, r_min]; Runge–Kutta takes over from there.
inline IvpResult ivp_integrate(double amplitude, const LogParams& lp, const ParamSet& ps, const Grid& g,
                               const IvpOptions& opt = {}) {
    require_tau_ge_one(lp);
    if (!(opt.r_min > 0.0 && opt.r_min <= 1e-4)) throw ValidationError("ivp: r_min must lie in (0, 1e-4]");
    const double p_star = derived_constants(ps).p_star;
    const detail::FluxSystem sys{ps, lp, p_star};

    IvpResult res;
    std::vector<double> vals(g.size(), amplitude);
    if (amplitude == 0.0) {
        res.profile = Profile(g, std::move(vals));
        res.last_good = {1.0, 0.0, 0.0};
        return res;
    }

    // Regular series at the origin: with the source frozen at u = a,
    // w = -f r^{θ+1}/(θ+1) and u = a - (f/(θ+1))^{1/(p-1)} r^{k+1}/(k+1),
    // k = (θ+1-α1)/(p-1). The flux at r_min integrates the actual source.
    const double fa = source_term(opt.r_min, amplitude, lp, p_star);
    const double k = (ps.theta + 1.0 - ps.alpha1) / (ps.p - 1.0);
    const double cu = std::pow(std::abs(fa) / (ps.theta + 1.0), 1.0 / (ps.p - 1.0)) / (k + 1.0);
    auto u_series = [&](double r) {
        const double d = cu * std::pow(r, k + 1.0);
        return fa > 0.0 ? amplitude - d : amplitude + d;
    };
    const double w_min = -gauss_panel<16>(0.0, opt.r_min, [&](double s) {
        return std::pow(s, ps.theta) * source_term(s, amplitude, lp, p_star);
    });

    std::size_t i = 0;
    for (; i < g.size() && g.r(i) <= opt.r_min; ++i) vals[i] = u_series(g.r(i));
    std::array<double, 2> y{u_series(opt.r_min), w_min};
    double x = std::log(opt.r_min);
    res.last_good = {opt.r_min, y[0], y[1]};

    using namespace boost::numeric::odeint;
    auto stepper = make_controlled(opt.abs_tol, opt.rel_tol, runge_kutta_dopri5<std::array<double, 2>>());
    double dx = 1e-3;
    for (; i < g.size(); ++i) {
        const double target = std::log(g.r(i));
        while (x < target) {
            double h = std::min(dx, target - x);
            const double x_before = x;
            if (stepper.try_step(sys, y, x, h) == success) {
                ++res.steps;
                res.last_good = {std::exp(x), y[0], y[1]};
                if (!std::isfinite(y[0]) || std::abs(y[0]) > 1e150) {
                    res.ok = false;
                    res.failure = "solution blew up";
                    break;
                }
                // Keep the grown step unless it was clipped to hit the node.
                if (x < target || h > dx) dx = h;
            } else {
                dx = h;
            }
            if (x == x_before && dx < 1e-14) {
                res.ok = false;
                res.failure = "step-size underflow";
                break;
            }
        }
        if (!res.ok) break;
        vals[i] = y[0];
    }
    if (!res.ok) {
        for (; i < g.size(); ++i) vals[i] = res.last_good.u;
    }
    res.u_end = res.ok ? y[0] : res.last_good.u;
    res.w_end = res.ok ? y[1] : res.last_good.w;
    res.profile = Profile(g, std::move(vals));
    return res;
}

// Bumps cos((k-1/2)πr) and tents on a uniform partition of (0,1), all vanishing
// at r = 1, sampled on g.
inline std::vector<Profile> weak_test_set(const Grid& g, int test_count) {
    const int bumps = test_count / 2;
    const int tents = test_count - bumps;
    std::vector<Profile> out;
    for (int k = 1; k <= bumps; ++k) {
        out.push_back(Profile::sample(g, [&](double r) { return std::cos((k - 0.5) * M_PI * r); }));
    }
    const double hw = 1.0 / (tents + 1);
    for (int j = 1; j <= tents; ++j) {
        const double c = j * hw;
        out.push_back(Profile::sample(g, [&](double r) { return std::max(0.0, 1.0 - std::abs(r - c) / hw); }));
    }
    return out;
}

inline double weak_residual(const Profile& u, const LogParams& lp, const ParamSet& ps, int test_count = 20) {
    if (test_count < 2) throw ValidationError("weak_residual: need at least 2 tests");
    double worst = 0.0;
    for (const Profile& v : weak_test_set(u.grid(), test_count)) {
        worst = std::max(worst, std::abs(energy_pairing(u, v, lp, ps)) / dirichlet_norm(v, ps));
    }
    return worst;
}

struct ShootResult {
    Profile profile;
    double amplitude = 0.0;
    double boundary_residual = 0.0;  // |u(1)| before the boundary node is pinned to 0
    double weak_residual = 0.0;
    double min_interior = 0.0;  // min of u over nodes in (0,1)
    bool positive = false;
    std::size_t ode_steps = 0;
    int bisections = 0;
    double r_min = 0.0;
};

// u(1; a)
inline double shoot_boundary_value(double a, const LogParams& lp, const ParamSet& ps, const Grid& g,
                                   const IvpOptions& opt = {}) {
    const IvpResult r = ivp_integrate(a, lp, ps, g, opt);
    if (!r.ok) throw NumericalError("ivp failed at amplitude " + format_real(a) + ": " + r.failure);
    return r.u_end;
}

// First sign change of u(1; a) on a geometric amplitude scan.
inline std::optional<std::pair<double, double>> scan_bracket(const LogParams& lp, const ParamSet& ps, const Grid& g,
                                                             double a_min, double a_max, int count,
                                                             const IvpOptions& opt = {}) {
    double prev_a = a_min;
    double prev_f = shoot_boundary_value(a_min, lp, ps, g, opt);
    for (int i = 1; i < count; ++i) {
        const double a = a_min * std::pow(a_max / a_min, static_cast<double>(i) / (count - 1));
        const IvpResult r = ivp_integrate(a, lp, ps, g, opt);
        if (!r.ok) return std::nullopt;
        if ((prev_f > 0.0 && r.u_end < 0.0) || (prev_f < 0.0 && r.u_end > 0.0)) return std::make_pair(prev_a, a);
        prev_a = a;
        prev_f = r.u_end;
    }
    return std::nullopt;
}

inline ShootResult shoot(const LogParams& lp, const ParamSet& ps, std::pair<double, double> bracket, double tol,
                         const Grid& g, const IvpOptions& opt = {}, int test_count = 20) {
    require_tau_ge_one(lp);
    auto [lo, hi] = bracket;
    if (!(lo >= 0.0 && hi > lo)) throw ValidationError("shoot: bracket must satisfy 0 ≤ a_lo < a_hi");
    double flo = shoot_boundary_value(lo, lp, ps, g, opt);
    const double fhi = shoot_boundary_value(hi, lp, ps, g, opt);
    if (!(flo * fhi < 0.0)) throw NumericalError("shoot: no sign change of u(1; a) in bracket");

    ShootResult res;
    res.r_min = opt.r_min;
    double a = 0.5 * (lo + hi);
    IvpResult sol;
    for (int it = 0;; ++it) {
        if (it > 200) throw NumericalError("shoot: bisection did not converge");
        a = 0.5 * (lo + hi);
        sol = ivp_integrate(a, lp, ps, g, opt);
        if (!sol.ok) throw NumericalError("shoot: ivp failed during bisection: " + sol.failure);
        res.bisections = it + 1;
        if (std::abs(sol.u_end) < tol) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
            throw NumericalError("shoot: bracket collapsed before |u(1)| < tol");
        if ((sol.u_end > 0.0) == (flo > 0.0)) {
            lo = a;
            flo = sol.u_end;
        } else {
            hi = a;
        }
    }
    std::vector<double> v = sol.profile.values();
    res.boundary_residual = std::abs(v.back());
    v.back() = 0.0;
    res.profile = Profile(g, std::move(v));
    res.amplitude = a;
    res.ode_steps = sol.steps;
    res.min_interior = INFINITY;
    for (std::size_t i = 0; i + 1 < res.profile.size(); ++i) res.min_interior = std::min(res.min_interior, res.profile[i]);
    res.positive = res.min_interior > 0.0;
    res.weak_residual = weak_residual(res.profile, lp, ps, test_count);
    return res;
}

}  // namespace hslog
