#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "../analysis.hpp"
#include "../bliss.hpp"
#include "../orlicz.hpp"
#include "../shooting.hpp"
#include "config.hpp"

namespace hslog::cli {

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    bool all_pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return true;
    }
    void add(std::string name, double value, double threshold, bool pass) {
        checks.push_back(Check{std::move(name), value, threshold, pass});
    }
};

inline void write_checks_csv(std::ostream& os, const SuiteResult& r) {
    os << "check,value,threshold,pass\n";
    for (const auto& c : r.checks) {
        os << c.name << ',' << format_real(c.value) << ',' << format_real(c.threshold) << ','
           << (c.pass ? "true" : "false") << '\n';
    }
}

inline bool is_p0(const ParamSet& ps) { return ps.p == 2.0 && ps.alpha0 == 2.0 && ps.alpha1 == 2.0 && ps.theta == 2.0; }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Smooth profiles vanishing at r = 1: random combinations of cos((k-1/2)πr) with
// decaying coefficients, plus a random power bump. Fixed seed, fixed draw order.
inline std::vector<Profile> random_smooth_profiles(const Grid& g, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), expo(0.5, 4.0);
    std::vector<Profile> out;
    for (int i = 0; i < count; ++i) {
        double c[6];
        for (int k = 0; k < 6; ++k) c[k] = coef(rng) / (k + 1);
        const double e = expo(rng), w = coef(rng);
        out.push_back(Profile::sample(g, [&](double r) {
            double v = w * (1.0 - std::pow(r, e));
            for (int k = 0; k < 6; ++k) v += c[k] * std::cos((k + 0.5) * M_PI * r);
            return v;
        }));
    }
    return out;
}

// E_1(0,1) of the Â-normalized cut-off bubble over an ε list.
inline std::vector<double> e_scan(const ParamSet& ps, const LogParams& lp, const std::vector<double>& eps,
                                  const Grid& g, double r0, int threads) {
    const DerivedConstants dc = derived_constants(ps);
    const double A = normalized_A_hat(compute_S(dc), dc);
    return parallel_map(eps.size(), threads, [&](std::size_t i) {
        return concentration_E(0.0, 1.0, bubble_profile(BubbleSpec{eps[i], A, r0}, g, dc), 1.0, lp, ps);
    });
}

inline double worst_slack(const std::vector<Profile>& us, const ParamSet& ps) {
    double w = INFINITY;
    for (const auto& u : us) w = std::min(w, pointwise_bound_check(u, ps).worst_slack);
    return w;
}

inline SuiteResult suite_bliss(const RunConfig& c, int threads) {
    SuiteResult r{"bliss", {}};
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    const IdentityReport id = check_identities(dc);
    r.add("identities_residual", id.residual, 1e-12, id.pass);

    const ConstantsReport cr = compute_S(dc);
    const double d12 = rel_diff(cr.p_star_integral, cr.gradient_integral);
    r.add("bliss_integrals_rel_diff", d12, 1e-6, d12 < 1e-6);
    const double s1 = rel_diff(cr.sigma_p, std::pow(cr.S, -dc.p_star / ps.p));
    const double s2 = rel_diff(cr.sigma_p, std::pow(cr.S, -(ps.theta + 1.0) / (ps.alpha1 - ps.p + 1.0)));
    r.add("sigma_p_exponent_forms_rel_diff", std::max(s1, s2), 1e-12, std::max(s1, s2) < 1e-12);
    if (is_p0(ps)) {
        const double e1 = rel_diff(cr.S_power, std::pow(3.0, 1.5) * M_PI / 16.0);
        const double e2 = rel_diff(cr.sigma_p, 256.0 / (27.0 * M_PI * M_PI));
        r.add("S_power_closed_form_rel_err", e1, 1e-6, e1 < 1e-6);
        r.add("sigma_p_closed_form_rel_err", e2, 1e-6, e2 < 1e-6);
    }

    const Grid g = make_grid(c.M, c.gamma);
    const auto eps = c.epsilon_list;
    const BubbleNormScan scan = bubble_norm_deviations(eps, c.r0, g, dc);
    std::vector<double> dD, dL;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        dD.push_back(std::abs(scan.dirichlet_deviation[i]));
        dL.push_back(std::abs(scan.lpstar_deviation[i]));
    }
    const double sp = dc.s * ps.p, sps = dc.s * dc.p_star;
    const RateTable fD = rate_fit(eps, dD, RateModel::pure_power);
    const RateTable fL = rate_fit(eps, dL, RateModel::pure_power);
    r.add("dirichlet_deviation_exponent_rel_err", rel_diff(fD.fitted_exponent, sp), 0.10,
          rel_diff(fD.fitted_exponent, sp) <= 0.10);
    r.add("lpstar_deviation_exponent_rel_err", rel_diff(fL.fitted_exponent, sps), 0.15,
          rel_diff(fL.fitted_exponent, sps) <= 0.15);

    std::vector<Profile> bubbles = parallel_map(eps.size(), threads, [&](std::size_t i) {
        return normalized_bubble(eps[i], g, dc, c.r0);
    });
    const double slack = worst_slack(bubbles, ps);
    r.add("pointwise_bound_worst_slack", slack, -1e-12, slack >= -1e-12);
    return r;
}

inline SuiteResult suite_rates(const RunConfig& c, int threads) {
    SuiteResult r{"rates", {}};
    const ParamSet ps = c.params();
    const Grid g = make_grid(c.M, c.gamma);

    // Planted exponents.
    std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-5, 1e-6}, a, b;
    for (double e : eps) {
        a.push_back(2.0 * std::pow(e, 0.5) * std::log(std::abs(std::log(e))));
        b.push_back(3.0 * e);
    }
    const double ea = std::abs(rate_fit(eps, a, RateModel::power_times_loglog).fitted_exponent - 0.5);
    const double eb = std::abs(rate_fit(eps, b, RateModel::pure_power).fitted_exponent - 1.0);
    r.add("synthetic_loglog_exponent_abs_err", ea, 1e-6, ea < 1e-6);
    r.add("synthetic_power_exponent_abs_err", eb, 1e-6, eb < 1e-6);

    const LogParams lp = make_log_params(c.tau, c.beta);
    const auto E = e_scan(ps, lp, c.epsilon_list, g, c.r0, threads);
    const RateTable f = rate_fit(c.epsilon_list, E, RateModel::power_times_loglog);
    const double err = rel_diff(f.fitted_exponent, c.beta);
    r.add("E_concentration_exponent_rel_err", err, 0.15, err <= 0.15);
    return r;
}

inline SuiteResult suite_sweep(const RunConfig& c, int threads) {
    SuiteResult r{"sweep", {}};
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    const ConstantsReport cr = compute_S(dc);
    const Grid g = make_grid(c.M, c.gamma);
    MaximizeOptions opts;
    opts.r0 = c.r0;
    opts.threads = threads;

    if (c.beta < dc.beta_max && c.tau >= 1.0) {
        const MaximizeResult m = maximize_F(ps, make_log_params(c.tau, c.beta), g, opts);
        r.add("F_hat_minus_sigma_p_below_beta_max", m.value - cr.sigma_p, 1e-3, m.value >= cr.sigma_p + 1e-3);
        r.add("maximizer_pointwise_slack", pointwise_bound_check(m.profile, ps).worst_slack, -1e-12,
              pointwise_bound_check(m.profile, ps).worst_slack >= -1e-12);
    }

    const auto eps = resolvable_eps(c.epsilon_list, g);
    for (double b : c.beta_list) {
        const BubbleBound bb = bubble_lower_bound(ps, make_log_params(c.tau, b), eps, g, c.r0);
        r.add("bubble_bound_minus_sigma_p_beta_" + format_real(b), bb.value - cr.sigma_p, -1e-3,
              bb.value >= cr.sigma_p - 1e-3);
    }

    const auto rows = beta_sweep(ps, c.tau, c.beta_list, g, cr.sigma_p, opts);
    bool mono = true;
    double worst_increase = -INFINITY;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double inc = std::abs(rows[i].gap_to_sigma) - std::abs(rows[i - 1].gap_to_sigma);
        worst_increase = std::max(worst_increase, inc);
        mono = mono && inc <= 0.0;
    }
    if (rows.size() > 1) r.add("sweep_abs_gap_max_increase", worst_increase, 0.0, mono);
    const double last = std::abs(rows.back().gap_to_sigma);
    r.add("sweep_final_abs_gap", last, 0.01, last < 0.01);
    std::vector<Profile> profiles;
    for (const auto& row : rows) profiles.push_back(row.profile);
    const double slack = worst_slack(profiles, ps);
    r.add("sweep_pointwise_slack", slack, -1e-12, slack >= -1e-12);
    return r;
}

inline SuiteResult suite_mp(const RunConfig& c, int threads) {
    SuiteResult r{"mp", {}};
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    if (!(c.beta < dc.beta_max)) throw ValidationError("mp suite requires beta < beta_max");
    const LogParams lp = make_log_params(c.tau, c.beta);
    require_tau_ge_one(lp);
    const ConstantsReport cr = compute_S(dc);
    const double A = normalized_A_hat(cr, dc);
    const Grid g = make_grid(c.M, c.gamma);
    auto run = [&](const std::vector<double>& eps) {
        return parallel_map(eps.size(), threads, [&](std::size_t i) {
            return mountain_pass_gap(BubbleSpec{eps[i], A, c.r0}, lp, ps, g, cr);
        });
    };
    for (const auto& m : run(c.mp_epsilon_list)) {
        r.add("mp_gap_eps_" + format_real(m.epsilon), m.gap, 0.0, m.gap > 0.0);
        r.add("mp_I_at_scan_end_eps_" + format_real(m.epsilon), m.I_scan_end, 0.0, m.I_scan_end < 0.0);
    }
    std::vector<double> gaps;
    bool positive = true;
    for (const auto& m : run(c.mp_rate_epsilon_list)) {
        gaps.push_back(m.gap);
        positive = positive && m.gap > 0.0;
    }
    if (!positive) {
        r.add("mp_gap_rate_positive", 0.0, 0.0, false);
    } else {
        const RateTable f = rate_fit(c.mp_rate_epsilon_list, gaps, RateModel::power_times_loglog);
        const double err = rel_diff(f.fitted_exponent, c.beta);
        r.add("mp_gap_exponent_rel_err", err, 0.20, err <= 0.20);
    }
    return r;
}

inline SuiteResult suite_ncs(const RunConfig& c, int threads) {
    SuiteResult r{"ncs", {}};
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    const ConstantsReport cr = compute_S(dc);
    const Grid g = make_grid(c.M, c.gamma);
    const auto& eps = c.ncs_epsilon_list;
    const std::vector<Profile> us = parallel_map(eps.size(), threads, [&](std::size_t i) {
        return normalized_bubble(eps[i], g, dc, c.r0);
    });
    const NcsReport n = ncs_check(us, ps, c.tail_radii, c.tail_tol);
    r.add("ncs_normalized", n.normalized, 1.0, n.normalized);
    r.add("ncs_tails_vanish", n.tails_vanish, 1.0, n.tails_vanish);
    r.add("ncs_lp_vanish", n.lp_vanish, 1.0, n.lp_vanish);
    std::vector<std::pair<double, double>> pairs{{c.tau, c.beta}};
    if (!(c.tau == std::exp(1.0) && c.beta == 1.0)) pairs.emplace_back(std::exp(1.0), 1.0);
    for (auto [tau, beta] : pairs) {
        const LevelReport L = concentration_level_check(us, make_log_params(tau, beta), ps, cr.sigma_p, c.level_tol, n);
        r.add("level_tail_max_minus_bound_tau_" + format_real(tau) + "_beta_" + format_real(beta),
              L.tail_max - L.bound, 0.0, L.applied && L.pass);
    }
    const double slack = worst_slack(us, ps);
    r.add("ncs_pointwise_slack", slack, -1e-12, slack >= -1e-12);
    return r;
}

inline SuiteResult suite_orlicz(const RunConfig& c, int threads, EmbeddingReport* emb_out = nullptr) {
    SuiteResult r{"orlicz", {}};
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    const auto t = log_grid(1e-6, 1e6, 20);
    for (const GammaSpec& s : {GammaSpec{6.0, 1.0, 1.0}, GammaSpec{7.5, 0.5, 2.0},
                               GammaSpec{dc.p_star, 1.0, std::max(1.0, c.tau)}}) {
        const ConvexityReport cv = convexity_check(s, t);
        const std::string tag = "a_" + format_real(s.a) + "_b_" + format_real(s.b) + "_tau_" + format_real(s.tau);
        r.add("convexity_min_scaled_second_diff_" + tag, cv.min_scaled_second_diff, -1e-12, cv.second_diff_ok);
        r.add("phi_min_minus_lower_bound_" + tag, cv.phi_min - cv.phi_lower_bound, 0.0, cv.phi_ok);
        r.add("h_min_" + tag, cv.h_min, 1.0, cv.h_ok);
    }

    const LogParams lp = make_log_params(c.tau, c.beta);
    require_tau_ge_one(lp);
    const Grid g = make_grid(c.M, c.gamma);
    std::vector<Profile> us = random_smooth_profiles(g, c.random_profiles, c.seed);
    std::vector<std::string> ids;
    for (int i = 0; i < c.random_profiles; ++i) ids.push_back("random_" + std::to_string(i));
    for (double e : resolvable_eps(c.epsilon_list, g)) {
        us.push_back(bubble_profile(BubbleSpec{e, 1.0, c.r0}, g, dc));
        ids.push_back("bubble_" + format_real(e));
    }

    struct LuxCheck {
        double residual, homogeneity;
    };
    const auto lux = parallel_map(us.size(), threads, [&](std::size_t i) {
        const double n = luxemburg_norm(us[i], lp, ps);
        const double res = std::abs(luxemburg_modular(us[i], n, lp, ps) - 1.0);
        const double n3 = luxemburg_norm(us[i].scaled(-3.0), lp, ps);
        return LuxCheck{res, std::abs(n3 - 3.0 * n) / (3.0 * n)};
    });
    double worst_res = 0.0, worst_hom = 0.0;
    for (const auto& l : lux) {
        worst_res = std::max(worst_res, l.residual);
        worst_hom = std::max(worst_hom, l.homogeneity);
    }
    r.add("luxemburg_modular_residual", worst_res, 1e-8, worst_res < 1e-8);
    r.add("luxemburg_homogeneity_rel_err", worst_hom, 1e-10, worst_hom < 1e-10);

    MaximizeOptions opts;
    opts.r0 = c.r0;
    opts.threads = threads;
    const double F = maximize_F(ps, lp, g, opts).value;
    const double lambda0 = std::pow(1.05 * F, 1.0 / dc.p_star);
    const EmbeddingReport emb = embedding_check(us, ids, lp, ps, lambda0);
    double worst = 0.0;
    for (const auto& row : emb.rows) worst = std::max(worst, row.ratio);
    r.add("embedding_worst_ratio", worst, lambda0, emb.all_pass);
    if (emb_out) *emb_out = emb;
    return r;
}

}  // namespace hslog::cli
