#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "bliss.hpp"
#include "errors.hpp"
#include "functionals.hpp"
#include "parallel.hpp"
#include "params.hpp"
#include "radial.hpp"

namespace hslog {

// ---------------------------------------------------------------- rate fits

enum class RateModel { pure_power, power_times_loglog };

inline const char* to_string(RateModel m) {
    return m == RateModel::pure_power ? "pure-power" : "power-times-loglog";
}

struct RateTable {
    std::vector<double> abscissae;
    std::vector<double> ordinates;
    double fitted_exponent = 0.0;
    double intercept = 0.0;
    double fit_residual = 0.0;  // RMS of the log-space residuals
    RateModel model = RateModel::pure_power;
};

// Least squares of ln(value) [− ln ln|ln ε|] against ln ε.
inline RateTable rate_fit(const std::vector<double>& eps, const std::vector<double>& values, RateModel model) {
    if (eps.size() != values.size()) throw ValidationError("rate_fit: size mismatch");
    if (eps.size() < 4) throw ValidationError("rate_fit: need at least 4 points");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw ValidationError("rate_fit: epsilon must be > 0");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw ValidationError("rate_fit: epsilon must be strictly decreasing");
        if (!(values[i] > 0.0)) throw ValidationError("rate_fit: nonpositive value in table");
        if (model == RateModel::power_times_loglog && !(eps[i] < std::exp(-1.0)))
            throw ValidationError("rate_fit: loglog model needs epsilon < 1/e");
    }
    const std::size_t n = eps.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(eps[i]);
        y[i] = std::log(values[i]);
        if (model == RateModel::power_times_loglog) y[i] -= std::log(std::log(std::abs(std::log(eps[i]))));
    }
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    RateTable t;
    t.abscissae = eps;
    t.ordinates = values;
    t.model = model;
    t.fitted_exponent = sxy / sxx;
    t.intercept = ym - t.fitted_exponent * xm;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (t.intercept + t.fitted_exponent * x[i]);
        ss += e * e;
    }
    t.fit_residual = std::sqrt(ss / n);
    return t;
}

// ------------------------------------------------------ sphere maximization

namespace detail {

// J and the Dirichlet energy as functions of the nodal vector, with every weight
// that does not depend on the values precomputed once.
class SphereProblem {
public:
    SphereProblem(const ParamSet& ps, const LogParams& lp, const Grid& g)
        : ps_(ps), lp_(lp), g_(g), p_star_(derived_constants(ps).p_star) {
        const double r0 = g.r(0);
        c0_ = std::pow(r0, ps.theta + 1.0) / (ps.theta + 1.0);
        rb0_ = std::pow(r0, lp.beta);
        for (const QuadPoint& q : g.quad()) {
            c_.push_back(q.weight * std::pow(q.r, ps.theta));
            rb_.push_back(std::pow(q.r, lp.beta));
            t_.push_back(q.t);
            cell_.push_back(q.cell);
        }
        const std::size_t M = g.size();
        W_.assign(M, 0.0);
        h_.assign(M, 0.0);
        for (std::size_t k = 1; k < M; ++k) {
            W_[k] = power_cell_integral(g.r(k - 1), g.r(k), ps.alpha1);
            h_[k] = g.r(k) - g.r(k - 1);
        }
    }

    std::size_t size() const { return g_.size(); }

    double value(const std::vector<double>& x) const {
        double acc = c0_ * F(x[0], rb0_);
        for (std::size_t i = 0; i < c_.size(); ++i) acc += c_[i] * F(interp(x, i), rb_[i]);
        return acc;
    }

    double value_grad(const std::vector<double>& x, std::vector<double>& grad) const {
        grad.assign(x.size(), 0.0);
        double acc = c0_ * F(x[0], rb0_);
        grad[0] += c0_ * dF(x[0], rb0_);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            const double u = interp(x, i);
            acc += c_[i] * F(u, rb_[i]);
            const double d = c_[i] * dF(u, rb_[i]);
            grad[cell_[i] - 1] += (1.0 - t_[i]) * d;
            grad[cell_[i]] += t_[i] * d;
        }
        return acc;
    }

    double dirichlet(const std::vector<double>& x) const {
        double acc = 0.0;
        for (std::size_t k = 1; k < x.size(); ++k) {
            const double s = std::abs(x[k] - x[k - 1]) / h_[k];
            if (s > 0.0) acc += W_[k] * std::pow(s, ps_.p);
        }
        return acc;
    }

    void dirichlet_grad(const std::vector<double>& x, std::vector<double>& grad) const {
        grad.assign(x.size(), 0.0);
        for (std::size_t k = 1; k < x.size(); ++k) {
            const double s = (x[k] - x[k - 1]) / h_[k];
            if (s == 0.0) continue;
            const double d = ps_.p * W_[k] * std::pow(std::abs(s), ps_.p - 2.0) * s / h_[k];
            grad[k] += d;
            grad[k - 1] -= d;
        }
    }

    // Stiffness of the linearized p-Laplacian at x, restricted to the free nodes
    // 0..M-2 (the last node is pinned at zero). Stored as cell weights ω_k/h_k².
    std::vector<double> metric(const std::vector<double>& x) const {
        const std::size_t M = x.size();
        std::vector<double> w(M, 0.0);
        if (ps_.p == 2.0) {
            for (std::size_t k = 1; k < M; ++k) w[k] = W_[k] / (h_[k] * h_[k]);
            return w;
        }
        double smax = 0.0;
        for (std::size_t k = 1; k < M; ++k) smax = std::max(smax, std::abs(x[k] - x[k - 1]) / h_[k]);
        const double floor = std::max(smax * 1e-6, std::numeric_limits<double>::min());
        for (std::size_t k = 1; k < M; ++k) {
            const double s = std::max(std::abs(x[k] - x[k - 1]) / h_[k], floor);
            w[k] = W_[k] * std::pow(s, ps_.p - 2.0) / (h_[k] * h_[k]);
        }
        return w;
    }

    // Solves K y = b on the free nodes (Thomas algorithm); y[M-1] = 0.
    static std::vector<double> solve(const std::vector<double>& w, std::vector<double> b) {
        const std::size_t n = w.size() - 1;  // free unknowns 0..n-1
        std::vector<double> diag(n), up(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            diag[i] = w[i + 1] + (i > 0 ? w[i] : 0.0);
            if (i + 1 < n) up[i] = -w[i + 1];
        }
        for (std::size_t i = 1; i < n; ++i) {
            const double f = up[i - 1] / diag[i - 1];
            diag[i] -= f * up[i - 1];
            b[i] -= f * b[i - 1];
        }
        b[n - 1] /= diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - up[i] * b[i + 1]) / diag[i];
        b[n] = 0.0;
        return b;
    }

    static double metric_norm2(const std::vector<double>& w, const std::vector<double>& y) {
        double acc = 0.0;
        for (std::size_t k = 1; k < y.size(); ++k) acc += w[k] * (y[k] - y[k - 1]) * (y[k] - y[k - 1]);
        return acc;
    }

private:
    double interp(const std::vector<double>& x, std::size_t i) const {
        return (1.0 - t_[i]) * x[cell_[i] - 1] + t_[i] * x[cell_[i]];
    }

    double F(double u, double rb) const {
        const double a = std::abs(u);
        if (a == 0.0) return 0.0;
        if (lp_.log_off) return std::pow(a, p_star_);
        const double L = std::abs(log_tau(lp_.tau, a));
        if (L == 0.0) return 0.0;
        return std::pow(a, p_star_) * std::pow(L, rb);
    }

    double dF(double u, double rb) const {
        const double a = std::abs(u);
        if (a == 0.0) return 0.0;
        const double ap = std::pow(a, p_star_ - 1.0);
        double d;
        if (lp_.log_off) {
            d = p_star_ * ap;
        } else {
            const double Ls = log_tau(lp_.tau, a);
            const double L = std::abs(Ls);
            if (L == 0.0) return 0.0;
            const double Lrb = std::pow(L, rb);
            d = p_star_ * ap * Lrb + a * ap * rb * (Lrb / Ls) / (lp_.tau + a);
        }
        return u > 0.0 ? d : -d;
    }

    ParamSet ps_;
    LogParams lp_;
    Grid g_;
    double p_star_;
    double c0_ = 0.0, rb0_ = 0.0;
    std::vector<double> c_, rb_, t_;
    std::vector<std::size_t> cell_;
    std::vector<double> W_, h_;
};

}  // namespace detail

struct MaximizeOptions {
    std::vector<double> seed_eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    double r0 = 0.2;
    int max_iter = 5000;
    double rel_tol = 1e-10;
    bool nonnegative = true;
    int threads = 1;
};

struct SeedRun {
    double seed_epsilon = 0.0;
    double start_value = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct MaximizeResult {
    Profile profile;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    double seed_epsilon = 0.0;
    bool nonnegative_search = true;
    std::vector<SeedRun> runs;
};

// Unit-norm bubble u_ε/‖u_ε‖ on g. Â drops out after normalization.
inline Profile normalized_bubble(double eps, const Grid& g, const DerivedConstants& dc, double r0 = 0.2) {
    return normalize(bubble_profile(BubbleSpec{eps, 1.0, r0}, g, dc), dc.params);
}

inline std::vector<double> resolvable_eps(const std::vector<double>& eps, const Grid& g) {
    std::vector<double> out;
    for (double e : eps) {
        if (g.r(0) <= e / 10.0) out.push_back(e);
    }
    return out;
}

namespace detail {

struct AscentOutcome {
    std::vector<double> x;
    int iterations = 0;
    bool converged = false;
};

// Ascent on {D = 1}: gradients are taken in the metric of the linearized
// p-Laplacian and projected onto the tangent space, Polak–Ribière directions
// accelerate the flat concentration direction, the retraction is
// x ↦ x/D(x)^{1/p}, and steps are accepted by Armijo backtracking.
inline AscentOutcome sphere_ascent(const SphereProblem& P, std::vector<double> x, const ParamSet& ps,
                                   const MaximizeOptions& opts) {
    const std::size_t M = x.size();
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    };
    std::vector<double> gJ, gD, y(M), gJ_prev, rg_prev, dir;
    double alpha = -1.0, slope_prev = 0.0;
    AscentOutcome out;
    for (int it = 1; it <= opts.max_iter; ++it) {
        out.iterations = it;
        const double J = P.value_grad(x, gJ);
        P.dirichlet_grad(x, gD);
        gJ[M - 1] = gD[M - 1] = 0.0;
        const auto w = P.metric(x);
        auto rg = SphereProblem::solve(w, gJ);
        const auto nrm = SphereProblem::solve(w, gD);
        const double gDn = dot(gD, nrm);
        const double mu = dot(gJ, nrm) / gDn;
        for (std::size_t i = 0; i < M; ++i) rg[i] -= mu * nrm[i];

        double pr = 0.0;
        if (!gJ_prev.empty()) {
            double num = 0.0;
            for (std::size_t i = 0; i < M; ++i) num += (gJ[i] - gJ_prev[i]) * rg[i];
            pr = std::max(0.0, num / dot(gJ_prev, rg_prev));
        }
        if (pr > 0.0) {
            for (std::size_t i = 0; i < M; ++i) dir[i] = rg[i] + pr * dir[i];
            const double c = dot(gD, dir) / gDn;
            for (std::size_t i = 0; i < M; ++i) dir[i] -= c * nrm[i];
        } else {
            dir = rg;
        }
        if (opts.nonnegative) {
            for (std::size_t i = 0; i < M; ++i) {
                if (x[i] <= 0.0 && dir[i] < 0.0) dir[i] = 0.0;
            }
        }
        double slope = dot(gJ, dir);
        if (!(slope > 0.0) && pr > 0.0) {
            dir = rg;
            if (opts.nonnegative) {
                for (std::size_t i = 0; i < M; ++i) {
                    if (x[i] <= 0.0 && dir[i] < 0.0) dir[i] = 0.0;
                }
            }
            slope = dot(gJ, dir);
        }
        if (!(slope > 0.0)) {
            out.converged = true;
            break;
        }
        gJ_prev = gJ;
        rg_prev = rg;

        const double dn = std::sqrt(SphereProblem::metric_norm2(w, dir));
        alpha = alpha < 0.0 ? 0.1 / dn : 2.0 * alpha * std::min(1.0, slope_prev / slope);
        alpha = std::min(alpha, 0.5 / dn);
        slope_prev = slope;
        bool accepted = false;
        double Jy = J;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < M; ++i) {
                y[i] = x[i] + alpha * dir[i];
                if (opts.nonnegative && y[i] < 0.0) y[i] = 0.0;
            }
            y[M - 1] = 0.0;
            const double D = P.dirichlet(y);
            if (D > 0.0) {
                const double s = std::pow(D, -1.0 / ps.p);
                for (double& v : y) v *= s;
                Jy = P.value(y);
                if (Jy >= J + 1e-4 * alpha * slope) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            out.converged = true;
            break;
        }
        const double rel = (Jy - J) / std::abs(J);
        x.swap(y);
        if (rel < opts.rel_tol) {
            out.converged = true;
            break;
        }
    }
    out.x = std::move(x);
    return out;
}

}  // namespace detail

inline MaximizeResult maximize_F(const ParamSet& ps, const LogParams& lp, const Grid& g,
                                 const MaximizeOptions& opts = {}) {
    const DerivedConstants dc = derived_constants(ps);
    std::vector<double> seeds = resolvable_eps(opts.seed_eps, g);
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    if (seeds.empty()) throw ValidationError("maximize_F: no seed epsilon is resolvable on this grid");

    const detail::SphereProblem P(ps, lp, g);
    struct Run {
        SeedRun info;
        std::vector<double> x;
    };
    auto runs = parallel_map(seeds.size(), opts.threads, [&](std::size_t i) {
        const Profile start = normalized_bubble(seeds[i], g, dc, opts.r0);
        Run r;
        r.info.seed_epsilon = seeds[i];
        r.info.start_value = J(start, lp, ps);
        auto out = detail::sphere_ascent(P, start.values(), ps, opts);
        r.x = std::move(out.x);
        r.info.iterations = out.iterations;
        r.info.converged = out.converged;
        r.info.value = J(Profile(g, r.x), lp, ps);
        return r;
    });

    // Seeds are sorted ascending, so a strict comparison keeps the smallest ε on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].info.value > runs[best].info.value) best = i;
    }
    MaximizeResult res;
    res.profile = Profile(g, runs[best].x);
    res.value = runs[best].info.value;
    res.iterations = runs[best].info.iterations;
    res.converged = runs[best].info.converged;
    res.seed_epsilon = runs[best].info.seed_epsilon;
    res.nonnegative_search = opts.nonnegative;
    for (auto& r : runs) res.runs.push_back(r.info);
    return res;
}

struct BubbleBound {
    double value = -INFINITY;
    double best_epsilon = 0.0;
    std::vector<double> epsilons;
    std::vector<double> values;
};

inline BubbleBound bubble_lower_bound(const ParamSet& ps, const LogParams& lp, const std::vector<double>& eps_list,
                                      const Grid& g, double r0 = 0.2) {
    const DerivedConstants dc = derived_constants(ps);
    BubbleBound out;
    for (double eps : eps_list) {
        const double v = J(normalized_bubble(eps, g, dc, r0), lp, ps);
        out.epsilons.push_back(eps);
        out.values.push_back(v);
        if (v > out.value || (v == out.value && eps < out.best_epsilon)) {
            out.value = v;
            out.best_epsilon = eps;
        }
    }
    return out;
}

struct BetaSweepRow {
    double beta = 0.0;
    double F_hat = 0.0;
    double gap_to_sigma = 0.0;  // F̂ − Σ_p
    int iterations = 0;
    bool converged = false;
    Profile profile;
};

inline std::vector<BetaSweepRow> beta_sweep(const ParamSet& ps, double tau, const std::vector<double>& betas,
                                            const Grid& g, double sigma_p, MaximizeOptions opts = {}) {
    for (std::size_t i = 1; i < betas.size(); ++i) {
        if (!(betas[i] > betas[i - 1])) throw ValidationError("beta_sweep: beta values must be increasing");
    }
    const int outer = opts.threads;
    opts.threads = 1;
    return parallel_map(betas.size(), outer, [&](std::size_t i) {
        const auto r = maximize_F(ps, make_log_params(tau, betas[i]), g, opts);
        return BetaSweepRow{betas[i], r.value, r.value - sigma_p, r.iterations, r.converged, r.profile};
    });
}

// ------------------------------------------------------------- NCS checks

struct NcsReport {
    bool normalized = false;
    bool tails_vanish = false;
    bool lp_vanish = false;
    bool is_ncs = false;
    std::vector<double> norms;
    std::vector<std::vector<double>> tail_energy;  // [r0 index][member]
    std::vector<double> lp_norms;
};

inline NcsReport ncs_check(const std::vector<Profile>& us, const ParamSet& ps, const std::vector<double>& r0_list,
                           double tail_tol) {
    if (us.size() < 3) throw ValidationError("ncs_check: need at least 3 profiles");
    NcsReport rep;
    rep.normalized = true;
    for (const auto& u : us) {
        const double n = dirichlet_norm(u, ps);
        rep.norms.push_back(n);
        rep.normalized = rep.normalized && std::abs(n - 1.0) <= 1e-8;
        rep.lp_norms.push_back(lq_norm(u, ps.p, ps.theta));
    }
    rep.tails_vanish = true;
    for (double r0 : r0_list) {
        std::vector<double> t;
        for (const auto& u : us) t.push_back(tail_energy(u, ps, r0));
        for (std::size_t j = 1; j < t.size(); ++j) rep.tails_vanish = rep.tails_vanish && t[j] < t[j - 1];
        rep.tails_vanish = rep.tails_vanish && t.back() < tail_tol;
        rep.tail_energy.push_back(std::move(t));
    }
    rep.lp_vanish = true;
    for (std::size_t j = 1; j < us.size(); ++j) rep.lp_vanish = rep.lp_vanish && rep.lp_norms[j] < rep.lp_norms[j - 1];
    rep.lp_vanish = rep.lp_vanish && rep.lp_norms.back() <= 0.5 * rep.lp_norms.front();
    rep.is_ncs = rep.normalized && rep.tails_vanish && rep.lp_vanish;
    return rep;
}

struct LevelReport {
    bool applied = false;  // false: the family is not an NCS and the check was skipped
    bool pass = false;
    std::vector<double> values;  // J(u_j) for every member
    std::size_t tail_start = 0;
    double tail_max = 0.0;  // running max of J over members tail_start..end
    double bound = 0.0;     // Σ_p + tol
};

inline LevelReport concentration_level_check(const std::vector<Profile>& us, const LogParams& lp, const ParamSet& ps,
                                             double sigma_p, double tol, const NcsReport& ncs) {
    LevelReport rep;
    rep.bound = sigma_p + tol;
    if (!ncs.is_ncs) return rep;
    rep.applied = true;
    for (const auto& u : us) rep.values.push_back(J(u, lp, ps));
    rep.tail_start = us.size() / 2;
    rep.tail_max = *std::max_element(rep.values.begin() + static_cast<std::ptrdiff_t>(rep.tail_start), rep.values.end());
    rep.pass = rep.tail_max <= rep.bound;
    return rep;
}

// -------------------------------------------------------- Nehari-type root

struct TEpsResult {
    double t = 0.0;
    double residual = 0.0;
};

// Root of t^{p-1}‖u‖^p − t^{p*-1}∫ r^θ|u|^{p*} ln(τ+t|u|)^{r^β} dr in the bracket.
inline TEpsResult solve_t_eps(const Profile& u, const LogParams& lp, const ParamSet& ps,
                              std::pair<double, double> bracket = {0.5, 2.0}) {
    require_tau_ge_one(lp);
    const double p_star = derived_constants(ps).p_star;
    const double D = dirichlet_energy(u, ps);
    auto phi = [&](double t) {
        const double I = weighted_integral(u.grid(), ps.theta, [&](const QuadPoint& q) {
            const double a = std::abs(u.at(q));
            if (a == 0.0) return 0.0;
            return std::pow(a, p_star) * log_factor(q.r, t * a, lp);
        });
        return std::pow(t, ps.p - 1.0) * D - std::pow(t, p_star - 1.0) * I;
    };
    auto [lo, hi] = bracket;
    const double flo = phi(lo), fhi = phi(hi);
    if (flo == 0.0) return {lo, 0.0};
    if (fhi == 0.0) return {hi, 0.0};
    if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("solve_t_eps: no sign change in bracket");
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(phi, lo, hi, flo, fhi,
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    const double t = 0.5 * (r.first + r.second);
    return {t, std::abs(phi(t))};
}

// ------------------------------------------------------ mountain-pass level

namespace detail {

// I(t·u) for a fixed analytic profile sampled at the grid's quadrature points.
class RayEnergy {
public:
    template <class U, class DU>
    RayEnergy(const Grid& g, const ParamSet& ps, const LogParams& lp, U&& u, DU&& du)
        : ps_(ps), lp_(lp), p_star_(derived_constants(ps).p_star) {
        require_tau_ge_one(lp);
        const double r0 = g.r(0);
        auto push = [&](double r, double c) {
            r_.push_back(r);
            c_.push_back(c);
            u_.push_back(u(r));
        };
        push(r0, std::pow(r0, ps.theta + 1.0) / (ps.theta + 1.0));
        D_ = std::pow(std::abs(du(r0)), ps.p) * std::pow(r0, ps.alpha1 + 1.0) / (ps.alpha1 + 1.0);
        for (const QuadPoint& q : g.quad()) {
            push(q.r, q.weight * std::pow(q.r, ps.theta));
            D_ += q.weight * std::pow(q.r, ps.alpha1) * std::pow(std::abs(du(q.r)), ps.p);
        }
    }

    double dirichlet_energy() const { return D_; }

    double operator()(double t) const {
        double acc = std::pow(t, ps_.p) * D_ / ps_.p;
        for (std::size_t i = 0; i < r_.size(); ++i) {
            const double x = t * u_[i];
            acc += c_[i] * (-J_density(r_[i], x, lp_, p_star_) / p_star_ + G_core(r_[i], x, lp_, p_star_));
        }
        return acc;
    }

private:
    ParamSet ps_;
    LogParams lp_;
    double p_star_;
    double D_ = 0.0;
    std::vector<double> r_, c_, u_;
};

}  // namespace detail

struct MpGapResult {
    double epsilon = 0.0;
    double t_star = 0.0;
    double max_I = 0.0;
    double threshold = 0.0;
    double gap = 0.0;
    double t_scan_end = 0.0;
    double I_scan_end = 0.0;
};

// (1/p − 1/p*) S^{(θ+1)/(θ−α1+p)}
inline double mp_threshold(const ConstantsReport& cr, const DerivedConstants& dc) {
    return (1.0 / dc.params.p - 1.0 / dc.p_star) * cr.S_power;
}

// max_t I(t·u_ε) along the ray of the exact cut-off bubble, evaluated on the
// grid's quadrature points with the analytic derivative. This is an upper bound
// for c_MP, not c_MP itself.
inline MpGapResult mountain_pass_gap(const BubbleSpec& spec, const LogParams& lp, const ParamSet& ps, const Grid& g,
                                     const ConstantsReport& cr) {
    require_tau_ge_one(lp);
    validate_bubble(spec);
    require_resolved(g, spec.epsilon);
    const DerivedConstants dc = derived_constants(ps);
    const detail::RayEnergy I(
        g, ps, lp, [&](double r) { return bubble_value(spec, r, dc); },
        [&](double r) { return bubble_derivative(spec, r, dc); });

    const int n = 81;
    const double lt0 = std::log(0.05), lt1 = std::log(20.0);
    std::vector<double> ts(n), Is(n);
    for (int i = 0; i < n; ++i) {
        ts[i] = std::exp(lt0 + (lt1 - lt0) * i / (n - 1));
        Is[i] = I(ts[i]);
    }
    const auto k = static_cast<std::size_t>(std::max_element(Is.begin(), Is.end()) - Is.begin());
    const double a = ts[k == 0 ? 0 : k - 1], b = ts[std::min<std::size_t>(k + 1, n - 1)];
    std::uintmax_t iters = 200;
    const auto mn = boost::math::tools::brent_find_minima([&](double t) { return -I(t); }, a, b, 52, iters);

    MpGapResult out;
    out.epsilon = spec.epsilon;
    out.t_star = mn.first;
    out.max_I = std::max(-mn.second, Is[k]);
    out.threshold = mp_threshold(cr, dc);
    out.gap = out.threshold - out.max_I;
    out.t_scan_end = ts.back();
    out.I_scan_end = Is.back();
    return out;
}

// I on spheres ‖u‖ = ρ along the direction of u.
inline std::vector<std::pair<double, double>> mp_ridge(const Profile& u, const LogParams& lp, const ParamSet& ps,
                                                       const std::vector<double>& rhos) {
    const Profile v = normalize(u, ps);
    std::vector<std::pair<double, double>> out;
    for (double rho : rhos) out.emplace_back(rho, energy_I(v.scaled(rho), lp, ps));
    return out;
}

}  // namespace hslog
