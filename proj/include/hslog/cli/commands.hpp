#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "../analysis.hpp"
#include "../bliss.hpp"
#include "../orlicz.hpp"
#include "../shooting.hpp"
#include "config.hpp"
#include "suites.hpp"

namespace hslog::cli {

struct Context {
    std::string out_dir;  // empty: use the config's output_dir
    int threads = 1;
    std::string suite = "all";
};

namespace detail {

inline std::filesystem::path out_path(const RunConfig& c, const Context& ctx, const std::string& name) {
    const std::filesystem::path dir = ctx.out_dir.empty() ? c.output_dir : ctx.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir / name;
}

inline std::ofstream open_out(const RunConfig& c, const Context& ctx, const std::string& name) {
    const auto path = out_path(c, ctx, name);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + path.string() + "'");
    return f;
}

inline void kv(std::ostream& os, const std::string& k, double v) { os << k << " = " << format_real(v) << '\n'; }
inline void kv(std::ostream& os, const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; }

inline void write_rate_csv(std::ostream& os, const RateTable& t) {
    os << "epsilon,value,model,fitted_exponent,residual\n";
    for (std::size_t i = 0; i < t.abscissae.size(); ++i) {
        os << format_real(t.abscissae[i]) << ',' << format_real(t.ordinates[i]) << ',' << to_string(t.model) << ','
           << format_real(t.fitted_exponent) << ',' << format_real(t.fit_residual) << '\n';
    }
}

}  // namespace detail

inline int cmd_constants(const RunConfig& c, const Context& ctx, std::ostream& log) {
    const DerivedConstants dc = derived_constants(c.params());
    const IdentityReport id = check_identities(dc);
    const ConstantsReport cr = compute_S(dc);
    const std::vector<std::pair<std::string, double>> rows{
        {"p", dc.params.p},
        {"alpha0", dc.params.alpha0},
        {"alpha1", dc.params.alpha1},
        {"theta", dc.params.theta},
        {"p_star", dc.p_star},
        {"s", dc.s},
        {"n", dc.n},
        {"m", dc.m},
        {"c_hat", dc.c_hat},
        {"kappa", dc.kappa},
        {"beta_max", dc.beta_max},
        {"identity_residual", id.residual},
        {"S", cr.S},
        {"S_power", cr.S_power},
        {"sigma_p", cr.sigma_p},
        {"p_star_integral", cr.p_star_integral},
        {"gradient_integral", cr.gradient_integral},
    };
    auto f = detail::open_out(c, ctx, "constants.csv");
    f << "name,value\n";
    for (const auto& [k, v] : rows) {
        f << k << ',' << format_real(v) << '\n';
        detail::kv(log, k, v);
    }
    return 0;
}

inline int cmd_maximize(const RunConfig& c, const Context& ctx, std::ostream& log) {
    const ParamSet ps = c.params();
    const ConstantsReport cr = compute_S(derived_constants(ps));
    const Grid g = make_grid(c.M, c.gamma);
    MaximizeOptions opts;
    opts.r0 = c.r0;
    opts.threads = ctx.threads;
    const MaximizeResult m = maximize_F(ps, make_log_params(c.tau, c.beta), g, opts);
    {
        auto f = detail::open_out(c, ctx, "maximizer.csv");
        write_profile_csv(f, m.profile);
    }
    auto f = detail::open_out(c, ctx, "maximize.txt");
    for (std::ostream* os : {static_cast<std::ostream*>(&f), &log}) {
        detail::kv(*os, "F_hat", m.value);
        detail::kv(*os, "sigma_p", cr.sigma_p);
        detail::kv(*os, "gap_to_sigma", m.value - cr.sigma_p);
        detail::kv(*os, "iterations", m.iterations);
        detail::kv(*os, "converged", m.converged ? "true" : "false");
        detail::kv(*os, "seed_epsilon", m.seed_epsilon);
        detail::kv(*os, "nonnegative_search", m.nonnegative_search ? "true" : "false");
        detail::kv(*os, "pointwise_bound_slack", pointwise_bound_check(m.profile, ps).worst_slack);
    }
    if (!m.converged) log << "warning: maximizer stopped at the iteration cap; value is best-so-far\n";
    return 0;
}

inline int cmd_sweep_beta(const RunConfig& c, const Context& ctx, std::ostream& log) {
    const ParamSet ps = c.params();
    const ConstantsReport cr = compute_S(derived_constants(ps));
    MaximizeOptions opts;
    opts.r0 = c.r0;
    opts.threads = ctx.threads;
    const auto rows = beta_sweep(ps, c.tau, c.beta_list, make_grid(c.M, c.gamma), cr.sigma_p, opts);
    auto f = detail::open_out(c, ctx, "beta_sweep.csv");
    f << "beta,F_hat,gap_to_sigma\n";
    for (const auto& r : rows) {
        f << format_real(r.beta) << ',' << format_real(r.F_hat) << ',' << format_real(r.gap_to_sigma) << '\n';
        log << "beta = " << format_real(r.beta) << "  F_hat = " << format_real(r.F_hat)
            << "  gap = " << format_real(r.gap_to_sigma) << (r.converged ? "" : "  (iteration cap)") << '\n';
    }
    return 0;
}

inline int cmd_rates(const RunConfig& c, const Context& ctx, std::ostream& log) {
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    const Grid g = make_grid(c.M, c.gamma);
    const auto& eps = c.epsilon_list;
    const BubbleNormScan scan = bubble_norm_deviations(eps, c.r0, g, dc);
    std::vector<double> dD, dL;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        dD.push_back(std::abs(scan.dirichlet_deviation[i]));
        dL.push_back(std::abs(scan.lpstar_deviation[i]));
    }
    const RateTable tD = rate_fit(eps, dD, RateModel::pure_power);
    const RateTable tL = rate_fit(eps, dL, RateModel::pure_power);
    const RateTable tE = rate_fit(eps, e_scan(ps, make_log_params(c.tau, c.beta), eps, g, c.r0, ctx.threads),
                                  RateModel::power_times_loglog);
    const std::vector<std::pair<std::string, const RateTable*>> out{
        {"rates_dirichlet.csv", &tD}, {"rates_lpstar.csv", &tL}, {"rates_E.csv", &tE}};
    for (const auto& [name, t] : out) {
        auto f = detail::open_out(c, ctx, name);
        detail::write_rate_csv(f, *t);
    }
    detail::kv(log, "dirichlet_deviation_exponent", tD.fitted_exponent);
    detail::kv(log, "dirichlet_expected_sp", dc.s * ps.p);
    detail::kv(log, "lpstar_deviation_exponent", tL.fitted_exponent);
    detail::kv(log, "lpstar_expected_sp_star", dc.s * dc.p_star);
    detail::kv(log, "E_exponent", tE.fitted_exponent);
    detail::kv(log, "E_expected_beta", c.beta);
    return 0;
}

inline int cmd_mp_gap(const RunConfig& c, const Context& ctx, std::ostream& log) {
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    const LogParams lp = make_log_params(c.tau, c.beta);
    require_tau_ge_one(lp);
    if (!(c.beta < dc.beta_max)) log << "warning: beta ≥ beta_max, outside the regime of the level estimate\n";
    const ConstantsReport cr = compute_S(dc);
    const double A = normalized_A_hat(cr, dc);
    const Grid g = make_grid(c.M, c.gamma);
    const auto& eps = c.mp_epsilon_list;
    const auto res = parallel_map(eps.size(), ctx.threads, [&](std::size_t i) {
        return mountain_pass_gap(BubbleSpec{eps[i], A, c.r0}, lp, ps, g, cr);
    });
    {
        auto f = detail::open_out(c, ctx, "mp_gap.csv");
        f << "epsilon,max_I,threshold,gap\n";
        for (const auto& m : res) {
            f << format_real(m.epsilon) << ',' << format_real(m.max_I) << ',' << format_real(m.threshold) << ','
              << format_real(m.gap) << '\n';
            log << "eps = " << format_real(m.epsilon) << "  c_MP upper bound = " << format_real(m.max_I)
                << "  threshold = " << format_real(m.threshold) << "  gap = " << format_real(m.gap) << '\n';
        }
    }
    // Ridge of I on small spheres along the first bubble's direction.
    const Profile u = bubble_profile(BubbleSpec{eps.front(), A, c.r0}, g, dc);
    auto f = detail::open_out(c, ctx, "mp_ridge.csv");
    f << "rho,I\n";
    for (const auto& [rho, I] : mp_ridge(u, lp, ps, {0.1, 0.2, 0.4})) {
        f << format_real(rho) << ',' << format_real(I) << '\n';
    }
    return 0;
}

inline int cmd_shoot(const RunConfig& c, const Context& ctx, std::ostream& log) {
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    if (!(c.tau >= 1.0)) throw ValidationError("tau must be ≥ 1 for the BVP");
    const LogParams lp = make_log_params(c.tau, c.beta);
    if (!(c.beta < dc.beta_max)) {
        log << "warning: beta = " << format_real(c.beta) << " ≥ beta_max = " << format_real(dc.beta_max)
            << ", outside existence regime; attempting anyway\n";
    }
    const Grid g = make_grid(c.M, c.gamma);
    IvpOptions opt;
    opt.r_min = c.r_min;
    const auto br = scan_bracket(lp, ps, g, c.amp_min, c.amp_max, c.amp_scan, opt);
    if (!br) throw NumericalError("shoot: no sign change of u(1; a) in the scanned amplitude range");
    const ShootResult s = shoot(lp, ps, *br, c.shoot_tol, g, opt, c.weak_tests);
    {
        auto f = detail::open_out(c, ctx, "solution.csv");
        write_profile_csv(f, s.profile);
    }
    auto f = detail::open_out(c, ctx, "shoot_metadata.txt");
    for (std::ostream* os : {static_cast<std::ostream*>(&f), &log}) {
        detail::kv(*os, "amplitude", s.amplitude);
        detail::kv(*os, "bracket_lo", br->first);
        detail::kv(*os, "bracket_hi", br->second);
        detail::kv(*os, "boundary_residual", s.boundary_residual);
        detail::kv(*os, "weak_residual", s.weak_residual);
        detail::kv(*os, "weak_tests", c.weak_tests);
        detail::kv(*os, "min_interior", s.min_interior);
        detail::kv(*os, "positive", s.positive ? "true" : "false");
        detail::kv(*os, "ode_steps", static_cast<double>(s.ode_steps));
        detail::kv(*os, "bisections", s.bisections);
        detail::kv(*os, "r_min", s.r_min);
        detail::kv(*os, "origin_condition", "zero flux (regular series start)");
        detail::kv(*os, "pointwise_bound_slack", pointwise_bound_check(s.profile, ps).worst_slack);
    }
    if (s.weak_residual >= c.weak_tol) {
        log << "weak residual " << format_real(s.weak_residual) << " ≥ weak_tol " << format_real(c.weak_tol) << '\n';
        return 2;
    }
    return 0;
}

inline int cmd_orlicz(const RunConfig& c, const Context& ctx, std::ostream& log) {
    EmbeddingReport emb;
    const SuiteResult r = suite_orlicz(c, ctx.threads, &emb);
    {
        auto f = detail::open_out(c, ctx, "orlicz.csv");
        write_checks_csv(f, r);
    }
    auto fe = detail::open_out(c, ctx, "embedding.csv");
    write_embedding_csv(fe, emb);
    for (const auto& ch : r.checks) {
        log << (ch.pass ? "PASS " : "FAIL ") << ch.name << " = " << format_real(ch.value) << '\n';
    }
    return r.all_pass() ? 0 : 2;
}

inline int cmd_ncs(const RunConfig& c, const Context& ctx, std::ostream& log) {
    const ParamSet ps = c.params();
    const DerivedConstants dc = derived_constants(ps);
    const ConstantsReport cr = compute_S(dc);
    const Grid g = make_grid(c.M, c.gamma);
    const auto& eps = c.ncs_epsilon_list;
    const std::vector<Profile> us = parallel_map(eps.size(), ctx.threads, [&](std::size_t i) {
        return normalized_bubble(eps[i], g, dc, c.r0);
    });
    const NcsReport n = ncs_check(us, ps, c.tail_radii, c.tail_tol);
    const LevelReport L = concentration_level_check(us, make_log_params(c.tau, c.beta), ps, cr.sigma_p, c.level_tol, n);
    auto f = detail::open_out(c, ctx, "ncs.csv");
    f << "epsilon,norm,lp_norm";
    for (double r0 : c.tail_radii) f << ",tail_" << format_real(r0);
    f << ",J\n";
    for (std::size_t j = 0; j < us.size(); ++j) {
        f << format_real(eps[j]) << ',' << format_real(n.norms[j]) << ',' << format_real(n.lp_norms[j]);
        for (const auto& t : n.tail_energy) f << ',' << format_real(t[j]);
        f << ',' << format_real(J(us[j], make_log_params(c.tau, c.beta), ps)) << '\n';
    }
    detail::kv(log, "is_ncs", n.is_ncs ? "true" : "false");
    detail::kv(log, "level_check", !L.applied ? "skipped (not an NCS)" : (L.pass ? "pass" : "fail"));
    if (L.applied) {
        detail::kv(log, "tail_max_J", L.tail_max);
        detail::kv(log, "bound", L.bound);
    }
    return 0;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"bliss", "rates", "sweep", "mp", "ncs", "orlicz"};
    return names;
}

inline int cmd_verify(const RunConfig& c, const Context& ctx, std::ostream& log) {
    const std::map<std::string, std::function<SuiteResult(const RunConfig&, int)>> suites{
        {"bliss", suite_bliss},
        {"rates", suite_rates},
        {"sweep", suite_sweep},
        {"mp", suite_mp},
        {"ncs", suite_ncs},
        {"orlicz", [](const RunConfig& c, int t) { return suite_orlicz(c, t); }},
    };
    std::vector<std::string> run;
    if (ctx.suite == "all") {
        run = suite_names();
    } else if (suites.count(ctx.suite)) {
        run = {ctx.suite};
    } else {
        throw ValidationError("unknown suite '" + ctx.suite + "'");
    }
    bool ok = true;
    for (const auto& name : run) {
        const SuiteResult r = suites.at(name)(c, ctx.threads);
        auto f = detail::open_out(c, ctx, "verify_" + name + ".csv");
        write_checks_csv(f, r);
        for (const auto& ch : r.checks) {
            log << (ch.pass ? "PASS " : "FAIL ") << name << ": " << ch.name << " = " << format_real(ch.value)
                << " (threshold " << format_real(ch.threshold) << ")\n";
        }
        ok = ok && r.all_pass();
    }
    log << (ok ? "verify: all checks passed\n" : "verify: some checks failed\n");
    return ok ? 0 : 2;
}

using Command = std::function<int(const RunConfig&, const Context&, std::ostream&)>;

inline const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> cmds{
        {"constants", cmd_constants}, {"verify", cmd_verify}, {"maximize", cmd_maximize},
        {"sweep-beta", cmd_sweep_beta}, {"rates", cmd_rates}, {"mp-gap", cmd_mp_gap},
        {"shoot", cmd_shoot},         {"orlicz", cmd_orlicz}, {"ncs", cmd_ncs},
    };
    return cmds;
}

// Maps the error taxonomy onto exit codes: 1 validation, 2 numerical.
inline int run_command(const std::string& name, const std::string& config_path, const Context& ctx,
                       std::ostream& log, std::ostream& err) {
    try {
        const auto it = commands().find(name);
        if (it == commands().end()) throw ValidationError("unknown command '" + name + "'");
        const RunConfig c = config_path.empty() ? parse_config_defaults() : load_config(config_path);
        if (ctx.threads < 1) throw ValidationError("--threads must be ≥ 1");
        return it->second(c, ctx, log);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace hslog::cli
