#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "functionals.hpp"
#include "params.hpp"
#include "radial.hpp"

namespace hslog {

struct GammaSpec {
    double a = 2.0;
    double b = 1.0;
    double tau = 1.0;
};

inline void validate_gamma(const GammaSpec& s) {
    if (!(s.a > 1.0)) throw ValidationError("gamma: a must be > 1");
    if (!(s.b >= 0.0 && s.b <= 1.0)) throw ValidationError("gamma: b must lie in [0,1]");
    if (!(s.tau >= 1.0)) throw ValidationError("gamma: tau must be ≥ 1");
}

// Γ(t) = t^a |ln(τ+t)|^b, with Γ(0) = 0.
inline double gamma_value(double t, const GammaSpec& s) {
    if (!(t >= 0.0)) throw ValidationError("gamma: t must be ≥ 0");
    if (t == 0.0) return 0.0;
    if (s.b == 0.0) return std::pow(t, s.a);
    return std::pow(t, s.a) * std::pow(std::abs(log_tau(s.tau, t)), s.b);
}

// h_τ(t) = (τ+t) ln(τ+t) / t
inline double h_tau(double t, double tau) { return (tau + t) * log_tau(tau, t) / t; }

// Φ_τ(t) = a(a-1)h² + b(a h + b - 1)
inline double phi_tau(double t, const GammaSpec& s) {
    const double h = h_tau(t, s.tau);
    return s.a * (s.a - 1.0) * h * h + s.b * (s.a * h + s.b - 1.0);
}

inline std::vector<double> log_grid(double lo, double hi, int per_decade) {
    const int n = static_cast<int>(std::ceil(per_decade * std::log10(hi / lo)));
    std::vector<double> t(n + 1);
    for (int i = 0; i <= n; ++i) t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / n);
    return t;
}

struct ConvexityReport {
    double min_scaled_second_diff = INFINITY;  // min of Γ''_h / (Γ/t²)
    bool second_diff_ok = false;
    double phi_min = INFINITY;
    double phi_lower_bound = 0.0;  // a(a-1) + b(a+b-1)
    bool phi_ok = false;
    double h_min = INFINITY;
    bool h_ok = false;
    bool convex = false;
};

inline ConvexityReport convexity_check(const GammaSpec& s, const std::vector<double>& t) {
    validate_gamma(s);
    if (t.size() < 3) throw ValidationError("convexity_check: need at least 3 grid points");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1]) || !(t[0] > 0.0)) throw ValidationError("convexity_check: grid must be positive and increasing");
    }
    ConvexityReport rep;
    std::vector<double> G(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) G[i] = gamma_value(t[i], s);
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double d2 = 2.0 * ((G[i + 1] - G[i]) / (t[i + 1] - t[i]) - (G[i] - G[i - 1]) / (t[i] - t[i - 1])) /
                          (t[i + 1] - t[i - 1]);
        const double scale = G[i] / (t[i] * t[i]);
        rep.min_scaled_second_diff = std::min(rep.min_scaled_second_diff, d2 / scale);
    }
    rep.second_diff_ok = rep.min_scaled_second_diff >= -1e-12;
    rep.phi_lower_bound = s.a * (s.a - 1.0) + s.b * (s.a + s.b - 1.0);
    for (double x : t) {
        rep.phi_min = std::min(rep.phi_min, phi_tau(x, s));
        rep.h_min = std::min(rep.h_min, h_tau(x, s.tau));
    }
    rep.phi_ok = rep.phi_min >= rep.phi_lower_bound && rep.phi_lower_bound > 0.0;
    rep.h_ok = rep.h_min >= 1.0;
    rep.convex = rep.second_diff_ok && rep.phi_ok && rep.h_ok;
    return rep;
}

// ρ(u/λ) = ∫ r^θ |u/λ|^{p*} |ln(τ+|u/λ|)|^{r^β} dr
inline double luxemburg_modular(const Profile& u, double lambda, const LogParams& lp, const ParamSet& ps) {
    return J(u.scaled(1.0 / lambda), lp, ps);
}

// Bisection in ln λ down to adjacent doubles; ρ(u/λ) decreases strictly in λ.
inline double luxemburg_norm(const Profile& u, const LogParams& lp, const ParamSet& ps) {
    require_tau_ge_one(lp);
    const bool zero = std::all_of(u.values().begin(), u.values().end(), [](double x) { return x == 0.0; });
    if (zero) return 0.0;
    const double p_star = derived_constants(ps).p_star;
    auto rho = [&](double lam) { return luxemburg_modular(u, lam, lp, ps); };

    double lo = std::max(lq_norm(u, p_star, ps.theta), std::numeric_limits<double>::min() * 1e10);
    int guard = 0;
    while (!(rho(lo) > 1.0)) {
        lo *= 0.5;
        if (++guard > 2000) throw NumericalError("luxemburg_norm: bracket failure (lower end)");
    }
    double hi = 2.0 * lo;
    guard = 0;
    while (!(rho(hi) < 1.0)) {
        hi *= 2.0;
        if (++guard > 2000) throw NumericalError("luxemburg_norm: bracket failure (upper end)");
    }
    for (int it = 0; it < 200 && hi > std::nextafter(lo, hi); ++it) {
        const double mid = std::sqrt(lo) * std::sqrt(hi);
        if (!(mid > lo && mid < hi)) break;
        (rho(mid) > 1.0 ? lo : hi) = mid;
    }
    return std::abs(rho(lo) - 1.0) <= std::abs(rho(hi) - 1.0) ? lo : hi;
}

struct EmbeddingRow {
    std::string profile_id;
    double luxemburg = 0.0;
    double dirichlet = 0.0;
    double ratio = 0.0;
    bool pass = false;
};

struct EmbeddingReport {
    double lambda0 = 0.0;
    std::vector<EmbeddingRow> rows;
    bool all_pass = false;
};

// ‖u‖_Lux ≤ λ0 ‖u‖ for every profile.
inline EmbeddingReport embedding_check(const std::vector<Profile>& us, const std::vector<std::string>& ids,
                                       const LogParams& lp, const ParamSet& ps, double lambda0) {
    if (ids.size() != us.size()) throw ValidationError("embedding_check: one id per profile required");
    EmbeddingReport rep;
    rep.lambda0 = lambda0;
    rep.all_pass = true;
    for (std::size_t i = 0; i < us.size(); ++i) {
        EmbeddingRow row;
        row.profile_id = ids[i];
        row.luxemburg = luxemburg_norm(us[i], lp, ps);
        row.dirichlet = dirichlet_norm(us[i], ps);
        row.ratio = row.dirichlet > 0.0 ? row.luxemburg / row.dirichlet : 0.0;
        row.pass = row.luxemburg <= lambda0 * row.dirichlet;
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline void write_embedding_csv(std::ostream& os, const EmbeddingReport& rep) {
    os << "profile_id,luxemburg,dirichlet,ratio,pass\n";
    for (const auto& r : rep.rows) {
        os << r.profile_id << ',' << format_real(r.luxemburg) << ',' << format_real(r.dirichlet) << ','
           << format_real(r.ratio) << ',' << (r.pass ? "true" : "false") << '\n';
    }
}

}  // namespace hslog
