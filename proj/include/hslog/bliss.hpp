#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "functionals.hpp"
#include "params.hpp"
#include "quadrature.hpp"
#include "radial.hpp"

namespace hslog {

// u*_ε(r) = ĉ ε^s / (ε^n + r^n)^{1/m}
inline double bliss_value(double eps, double r, const DerivedConstants& dc) {
    return dc.c_hat * std::pow(eps, dc.s) * std::pow(std::pow(eps, dc.n) + std::pow(r, dc.n), -1.0 / dc.m);
}

inline double bliss_derivative(double eps, double r, const DerivedConstants& dc) {
    if (r == 0.0) return 0.0;
    const double b = std::pow(eps, dc.n) + std::pow(r, dc.n);
    return -dc.c_hat * std::pow(eps, dc.s) * (dc.n / dc.m) * std::pow(r, dc.n - 1.0) *
           std::pow(b, -1.0 / dc.m - 1.0);
}

// Quintic smoothstep: 1 on [0,r0], 0 on [2r0,∞), C² in between.
inline double cutoff(double r, double r0) {
    if (r <= r0) return 1.0;
    if (r >= 2.0 * r0) return 0.0;
    const double x = (r - r0) / r0;
    return std::clamp(1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x)), 0.0, 1.0);
}

inline double cutoff_derivative(double r, double r0) {
    if (r <= r0 || r >= 2.0 * r0) return 0.0;
    const double x = (r - r0) / r0;
    return -30.0 * x * x * (1.0 - x) * (1.0 - x) / r0;
}

struct BubbleSpec {
    double epsilon = 1e-3;
    double A_hat = 1.0;
    double r0 = 0.2;
};

inline void validate_bubble(const BubbleSpec& b) {
    if (!(b.epsilon > 0.0)) throw ValidationError("bubble: epsilon must be > 0");
    if (!(b.A_hat > 0.0)) throw ValidationError("bubble: A_hat must be > 0");
    if (!(b.r0 > 0.0 && b.r0 < 0.5)) throw ValidationError("bubble: r0 must lie in (0, 1/2)");
}

inline double bubble_value(const BubbleSpec& b, double r, const DerivedConstants& dc) {
    return b.A_hat * cutoff(r, b.r0) * bliss_value(b.epsilon, r, dc);
}

inline double bubble_derivative(const BubbleSpec& b, double r, const DerivedConstants& dc) {
    return b.A_hat * (cutoff_derivative(r, b.r0) * bliss_value(b.epsilon, r, dc) +
                      cutoff(r, b.r0) * bliss_derivative(b.epsilon, r, dc));
}

inline void require_resolved(const Grid& g, double eps) {
    if (g.r(0) > eps / 10.0) throw ValidationError("grid too coarse for epsilon (need r_1 ≤ epsilon/10)");
}

inline Profile bubble_profile(const BubbleSpec& b, const Grid& g, const DerivedConstants& dc) {
    validate_bubble(b);
    require_resolved(g, b.epsilon);
    return Profile::sample(g, [&](double r) { return bubble_value(b, r, dc); });
}

namespace detail {

// log(1 + e^y) without overflow.
inline double log1pexp(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }

// ∫_{x0}^{x1} h with GL16 panels of width ≤ w.
template <class H>
double panel_sum(H&& h, double x0, double x1, double w) {
    const int n = std::max(1, static_cast<int>(std::ceil((x1 - x0) / w)));
    const double dx = (x1 - x0) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += gauss_panel<16>(x0 + i * dx, x0 + (i + 1) * dx, h);
    return acc;
}

// ∫_{x0}^∞ h(x) dx for h ~ C e^{-k x} at +∞; the remainder past the cutoff is
// closed by h(X)/k.
template <class H>
double to_infinity(H&& h, double x0, double k, double w) {
    const double X = std::max(x0 + 10.0, 37.0 / k);
    return panel_sum(h, x0, X, w) + h(X) / k;
}

// ∫_{-∞}^{∞} h(x) dx for h ~ e^{k0 x} at −∞ and ~ e^{-k1 x} at +∞.
template <class H>
double whole_line(H&& h, double k0, double k1, double w) {
    const double X0 = std::min(-10.0, -37.0 / k0);
    return h(X0) / k0 + panel_sum(h, X0, 0.0, w) + to_infinity(h, 0.0, k1, w);
}

// log u*_1(e^x) and log |u*_1'(e^x)|.
inline double log_bliss1(double x, const DerivedConstants& dc) {
    return std::log(dc.c_hat) - log1pexp(dc.n * x) / dc.m;
}
inline double log_bliss1_slope(double x, const DerivedConstants& dc) {
    return std::log(dc.c_hat * dc.n / dc.m) + (dc.n - 1.0) * x - (1.0 / dc.m + 1.0) * log1pexp(dc.n * x);
}

struct HalfLineExponents {
    double head_pstar, tail_pstar, head_grad, tail_grad;
};

inline HalfLineExponents half_line_exponents(const DerivedConstants& dc) {
    const ParamSet& ps = dc.params;
    return {ps.theta + 1.0, (ps.theta + 1.0) / (ps.p - 1.0),
            ps.alpha1 + ps.p * (dc.n - 1.0) + 1.0, (ps.alpha1 - ps.p + 1.0) / (ps.p - 1.0)};
}

// ∫_{R}^∞ r^{α1}|u*_ε'|^p dr and ∫_{R}^∞ r^θ u*_ε^{p*} dr via the scale invariance
// of both integrals (they equal the ε = 1 integrals from R/ε).
inline double grad_tail(double R_over_eps, const DerivedConstants& dc) {
    const auto ex = half_line_exponents(dc);
    const double p = dc.params.p, a1 = dc.params.alpha1;
    auto h = [&](double x) { return std::exp((a1 + 1.0) * x + p * log_bliss1_slope(x, dc)); };
    return to_infinity(h, std::log(R_over_eps), ex.tail_grad, 0.25);
}

inline double pstar_tail(double R_over_eps, const DerivedConstants& dc) {
    const auto ex = half_line_exponents(dc);
    const double th = dc.params.theta;
    auto h = [&](double x) { return std::exp((th + 1.0) * x + dc.p_star * log_bliss1(x, dc)); };
    return to_infinity(h, std::log(R_over_eps), ex.tail_pstar, 0.25);
}

}  // namespace detail

struct ConstantsReport {
    double S = 0.0;
    double S_power = 0.0;
    double sigma_p = 0.0;
    double p_star_integral = 0.0;
    double gradient_integral = 0.0;
};

inline ConstantsReport compute_S(const DerivedConstants& dc) {
    const ParamSet& ps = dc.params;
    const auto ex = detail::half_line_exponents(dc);
    auto h_pstar = [&](double x) {
        return std::exp((ps.theta + 1.0) * x + dc.p_star * detail::log_bliss1(x, dc));
    };
    auto h_grad = [&](double x) {
        return std::exp((ps.alpha1 + 1.0) * x + ps.p * detail::log_bliss1_slope(x, dc));
    };
    const double I1 = detail::whole_line(h_pstar, ex.head_pstar, ex.tail_pstar, 0.25);
    const double I2 = detail::whole_line(h_grad, ex.head_grad, ex.tail_grad, 0.25);
    const double I1c = detail::whole_line(h_pstar, ex.head_pstar, ex.tail_pstar, 0.5);
    const double I2c = detail::whole_line(h_grad, ex.head_grad, ex.tail_grad, 0.5);
    if (!std::isfinite(I1) || !std::isfinite(I2) || std::abs(I1 - I1c) > 1e-10 * I1 ||
        std::abs(I2 - I2c) > 1e-10 * I2) {
        throw NumericalError("compute_S: quadrature did not converge");
    }
    ConstantsReport rep;
    rep.p_star_integral = I1;
    rep.gradient_integral = I2;
    rep.S_power = I1;
    rep.S = std::pow(I1, (ps.theta - ps.alpha1 + ps.p) / (ps.theta + 1.0));
    rep.sigma_p = std::pow(rep.S, -dc.p_star / ps.p);
    return rep;
}

// Â making ‖u_ε‖^p = 1 + O(ε^{sp}).
inline double normalized_A_hat(const ConstantsReport& cr, const DerivedConstants& dc) {
    const ParamSet& ps = dc.params;
    return std::pow(cr.S, -(ps.theta + 1.0) / ((ps.theta - ps.alpha1 + ps.p) * ps.p));
}

struct BubbleNormScan {
    std::vector<double> epsilons;
    std::vector<double> dirichlet_deviation;  // ‖ηu*_ε‖^p − S_power
    std::vector<double> lpstar_deviation;     // ‖ηu*_ε‖^{p*}_{L^{p*}_θ} − S_power
};

// Deviations of the unit-amplitude cut-off bubble from the full-line integrals.
// Each is computed directly as an integral over r ≥ r0, where η differs from 1,
// so it is not buried under the O(1) value it perturbs.
inline BubbleNormScan bubble_norm_deviations(const std::vector<double>& eps_list, double r0, const Grid& g,
                                             const DerivedConstants& dc) {
    const ParamSet& ps = dc.params;
    BubbleNormScan out;
    std::vector<double> cuts{r0};
    for (double x : g.nodes()) {
        if (x > r0 && x < 2.0 * r0) cuts.push_back(x);
    }
    cuts.push_back(2.0 * r0);
    for (double eps : eps_list) {
        const BubbleSpec b{eps, 1.0, r0};
        validate_bubble(b);
        require_resolved(g, eps);
        double dD = 0.0, dL = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            dD += gauss_panel<16>(cuts[i], cuts[i + 1], [&](double r) {
                return std::pow(r, ps.alpha1) * (std::pow(std::abs(bubble_derivative(b, r, dc)), ps.p) -
                                                 std::pow(std::abs(bliss_derivative(eps, r, dc)), ps.p));
            });
            dL -= gauss_panel<16>(cuts[i], cuts[i + 1], [&](double r) {
                return std::pow(r, ps.theta) * (1.0 - std::pow(cutoff(r, r0), dc.p_star)) *
                       std::pow(bliss_value(eps, r, dc), dc.p_star);
            });
        }
        dD -= detail::grad_tail(2.0 * r0 / eps, dc);
        dL -= detail::pstar_tail(2.0 * r0 / eps, dc);
        out.epsilons.push_back(eps);
        out.dirichlet_deviation.push_back(dD);
        out.lpstar_deviation.push_back(dL);
    }
    return out;
}

struct CrossingRadii {
    std::optional<double> a_eps;
    std::optional<double> b_eps;
};

// Radii where |ln(τ + t·Â·u*_ε(r))| = 1, i.e. where t·Â·u*_ε hits e−τ or
// e^{-1}−τ. A = Â·ĉ is the full amplitude.
inline CrossingRadii crossing_radii(double eps, double tau, double t, double A, const DerivedConstants& dc) {
    const double e = std::exp(1.0);
    if (!(tau > 0.0)) throw ValidationError("crossing_radii: tau must be > 0");
    if (tau >= e) throw ValidationError("crossing_radii: tau ≥ e, log factor ≥ 1 everywhere (a_eps undefined)");
    if (!(eps > 0.0 && t > 0.0 && A > 0.0)) throw ValidationError("crossing_radii: eps, t, A must be > 0");
    auto radius = [&](double level) -> std::optional<double> {
        const double br = std::pow(t * A * std::pow(eps, dc.s) / level, dc.m) - std::pow(eps, dc.n);
        if (!(br > 0.0)) return std::nullopt;
        return std::pow(br, 1.0 / dc.n);
    };
    CrossingRadii out;
    out.a_eps = radius(e - tau);
    if (tau < 1.0 / e) out.b_eps = radius(1.0 / e - tau);
    return out;
}

// ∫_a^b r^θ|u|^{p*}(|ln(τ+t|u|)|^{r^β} − 1) dr as a difference of one primitive,
// which makes it exactly additive over subintervals.
inline double concentration_E(double a, double b, const Profile& u, double t, const LogParams& lp,
                              const ParamSet& ps) {
    if (!(0.0 <= a && a < b && b <= 1.0)) throw ValidationError("concentration_E: need 0 ≤ a < b ≤ 1");
    if (lp.log_off) return 0.0;
    const double p_star = derived_constants(ps).p_star;
    auto f = [&](const QuadPoint& q) {
        const double x = std::abs(u.at(q));
        if (x == 0.0) return 0.0;
        return std::pow(x, p_star) * (log_factor(q.r, t * x, lp) - 1.0);
    };
    return weighted_primitive(u.grid(), ps.theta, b, f) - weighted_primitive(u.grid(), ps.theta, a, f);
}

}  // namespace hslog
