#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "params.hpp"
#include "quadrature.hpp"
#include "radial.hpp"

namespace hslog {

struct LogParams {
    double tau = 1.0;
    double beta = 1.0;
    // Replace the logarithmic factor by 1 everywhere (the unperturbed problem).
    bool log_off = false;
};

inline LogParams make_log_params(double tau, double beta) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be > 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be > 0");
    return LogParams{tau, beta, false};
}

inline void require_tau_ge_one(const LogParams& lp) {
    if (!(lp.tau >= 1.0)) throw ValidationError("tau must be ≥ 1 for the energy functional");
}

// ln(τ + a) for a ≥ 0, exact near a = 0 when τ = 1.
inline double log_tau(double tau, double a) {
    if (tau >= 1.0) return std::log1p((tau - 1.0) + a);
    return std::log(tau + a);
}

inline double log_factor(double r, double u, const LogParams& lp) {
    if (lp.log_off || r == 0.0) return 1.0;
    const double L = std::abs(log_tau(lp.tau, std::abs(u)));
    if (L == 0.0) return 0.0;
    return std::pow(L, std::pow(r, lp.beta));
}

// r^θ |u|^{p*} |ln(τ+|u|)|^{r^β}, without the weight.
inline double J_density(double r, double u, const LogParams& lp, double p_star) {
    const double a = std::abs(u);
    if (a == 0.0) return 0.0;
    return std::pow(a, p_star) * log_factor(r, a, lp);
}

inline double J(const Profile& u, const LogParams& lp, const ParamSet& ps) {
    const double p_star = derived_constants(ps).p_star;
    return weighted_integral(u.grid(), ps.theta, [&](const QuadPoint& q) {
        return J_density(q.r, u.at(q), lp, p_star);
    });
}

inline double sobolev_J0(const Profile& u, const ParamSet& ps) {
    const double p_star = derived_constants(ps).p_star;
    return weighted_integral(u.grid(), ps.theta, [&](const QuadPoint& q) {
        return std::pow(std::abs(u.at(q)), p_star);
    });
}

struct HypothesisSet {
    std::function<double(double)> phi;
    double sigma = 2.0;
    double c = 1.0;
    std::pair<double, double> r_small{1e-300, 1e-8};
    std::pair<double, double> r_large{1.0 - 0x1p-10, 1.0 - 0x1p-40};
};

inline double J_phi(const Profile& u, double tau, const HypothesisSet& hs, const ParamSet& ps) {
    const double p_star = derived_constants(ps).p_star;
    return weighted_integral(u.grid(), ps.theta, [&](const QuadPoint& q) {
        const double a = std::abs(u.at(q));
        if (a == 0.0) return 0.0;
        const double e = q.r == 0.0 ? 0.0 : hs.phi(q.r);
        if (e == 0.0) return std::pow(a, p_star);
        const double L = std::abs(log_tau(tau, a));
        if (L == 0.0) return 0.0;
        return std::pow(a, p_star) * std::pow(L, e);
    });
}

struct HReport {
    bool h1 = false;
    bool h2 = false;
    bool h3 = false;
    double h2_max = 0.0;          // max of φ|ln r|^σ ln|ln r| on the small window
    double h3_worst_excess = 0.0;  // max over k of ratio_k − schedule_k (≤ 0 passes)
    std::vector<std::pair<int, double>> h3_ratios;  // (k, φ(1−2^{-k})/|ln 2^{-k}|)
};

// Schedule for the ratio φ(r)/|ln(1−r)| at r = 1 − 2^{-k}.
inline double h3_schedule(int k) { return 2.0 / std::sqrt(static_cast<double>(k)); }

inline HReport check_h_conditions(const HypothesisSet& hs) {
    if (!(hs.sigma > 1.0)) throw ValidationError("HypothesisSet: sigma must be > 1");
    if (!(hs.c > 0.0)) throw ValidationError("HypothesisSet: c must be > 0");
    const auto [slo, shi] = hs.r_small;
    const auto [llo, lhi] = hs.r_large;
    if (!(0.0 < slo && slo < shi && shi < 1.0 / std::exp(1.0)))
        throw ValidationError("HypothesisSet: r_small window must satisfy 0 < lo < hi < 1/e");
    if (!(0.0 < llo && llo < lhi && lhi < 1.0))
        throw ValidationError("HypothesisSet: r_large window must lie inside (0,1)");

    HReport rep;

    bool pos = hs.phi(0.0) == 0.0;
    for (int e = -300; e < 0 && pos; e += 3) pos = hs.phi(std::pow(10.0, e)) > 0.0;
    for (int i = 1; i < 100 && pos; ++i) pos = hs.phi(i / 100.0) > 0.0;
    for (int k = 1; k <= 50 && pos; ++k) pos = hs.phi(1.0 - std::ldexp(1.0, -k)) > 0.0;
    rep.h1 = pos;

    const double ll = std::log10(slo), lh = std::log10(shi);
    const int n = std::max(2, static_cast<int>(40 * (lh - ll)));
    rep.h2_max = -INFINITY;
    for (int i = 0; i <= n; ++i) {
        const double r = std::pow(10.0, ll + (lh - ll) * i / n);
        const double L = std::abs(std::log(r));
        rep.h2_max = std::max(rep.h2_max, hs.phi(r) * std::pow(L, hs.sigma) * std::log(L));
    }
    rep.h2 = rep.h2_max <= hs.c;

    const int k_lo = static_cast<int>(std::ceil(-std::log2(1.0 - llo) - 1e-9));
    const int k_hi = static_cast<int>(std::floor(-std::log2(1.0 - lhi) + 1e-9));
    rep.h3_worst_excess = -INFINITY;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double r = 1.0 - std::ldexp(1.0, -k);
        const double ratio = hs.phi(r) / (k * std::log(2.0));
        rep.h3_ratios.emplace_back(k, ratio);
        rep.h3_worst_excess = std::max(rep.h3_worst_excess, ratio - h3_schedule(k));
    }
    rep.h3 = !rep.h3_ratios.empty() && rep.h3_worst_excess <= 0.0;
    return rep;
}

namespace detail {

inline double g_core(double r, double s, const LogParams& lp, double p_star) {
    if (lp.log_off || r == 0.0 || s == 0.0) return 0.0;
    const double a = std::abs(s);
    const double L = log_tau(lp.tau, a);
    if (L == 0.0) return 0.0;
    const double rb = std::pow(r, lp.beta);
    const double mag = rb * std::pow(a, p_star) / (p_star * (lp.tau + a)) * std::pow(L, rb - 1.0);
    return s > 0.0 ? mag : -mag;
}

inline double G_core(double r, double u, const LogParams& lp, double p_star) {
    const double a = std::abs(u);
    if (lp.log_off || r == 0.0 || a == 0.0) return 0.0;
    return gauss_panel<16>(0.0, a, [&](double s) { return g_core(r, s, lp, p_star); });
}

}  // namespace detail

// g(r,s) = r^β |s|^{p*-1} s / (p* (τ+|s|) ln(τ+|s|)^{1-r^β})
inline double g_eval(double r, double s, const LogParams& lp, const ParamSet& ps) {
    require_tau_ge_one(lp);
    return detail::g_core(r, s, lp, derived_constants(ps).p_star);
}

// G(r,u) = ∫_0^u g(r,s) ds, one 16-point panel on [0,|u|].
inline double G_eval(double r, double u, const LogParams& lp, const ParamSet& ps) {
    require_tau_ge_one(lp);
    return detail::G_core(r, u, lp, derived_constants(ps).p_star);
}

inline double energy_I(const Profile& u, const LogParams& lp, const ParamSet& ps) {
    require_tau_ge_one(lp);
    const double p_star = derived_constants(ps).p_star;
    const double D = dirichlet_energy(u, ps);
    const double rest = weighted_integral(u.grid(), ps.theta, [&](const QuadPoint& q) {
        const double x = u.at(q);
        return -J_density(q.r, x, lp, p_star) / p_star + detail::G_core(q.r, x, lp, p_star);
    });
    return D / ps.p + rest;
}

// |u|^{p*-2} u ln(τ+|u|)^{r^β}
inline double source_term(double r, double u, const LogParams& lp, double p_star) {
    const double a = std::abs(u);
    if (a == 0.0) return 0.0;
    const double f = std::pow(a, p_star - 1.0) * log_factor(r, a, lp);
    return u > 0.0 ? f : -f;
}

inline double energy_pairing(const Profile& u, const Profile& v, const LogParams& lp,
                             const ParamSet& ps) {
    require_tau_ge_one(lp);
    if (!u.grid().same_as(v.grid())) throw ValidationError("pairing needs profiles on one grid");
    const Grid& g = u.grid();
    const double p_star = derived_constants(ps).p_star;
    double lin = 0.0;
    for (std::size_t k = 1; k < g.size(); ++k) {
        const double su = u.slope(k);
        if (su == 0.0) continue;
        lin += power_cell_integral(g.r(k - 1), g.r(k), ps.alpha1) * std::pow(std::abs(su), ps.p - 2.0) *
               su * v.slope(k);
    }
    const double src = weighted_integral(g, ps.theta, [&](const QuadPoint& q) {
        return source_term(q.r, u.at(q), lp, p_star) * v.at(q);
    });
    return lin - src;
}

}  // namespace hslog
