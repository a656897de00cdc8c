#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace hslog {

// Structural parameters (p, alpha0, alpha1, theta). Only validate_params builds
// one that downstream code can trust.
struct ParamSet {
    double p = 0.0;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double theta = 0.0;
};

struct DerivedConstants {
    ParamSet params;
    double p_star = 0.0;
    double s = 0.0;
    double n = 0.0;
    double m = 0.0;
    double c_hat = 0.0;
    double kappa = 0.0;
    double beta_max = 0.0;
};

struct IdentityReport {
    std::array<double, 6> residuals{};
    double residual = 0.0;
    bool pass = false;
};

inline ParamSet validate_params(double p, double alpha0, double alpha1, double theta) {
    if (!std::isfinite(p) || !std::isfinite(alpha0) || !std::isfinite(alpha1) ||
        !std::isfinite(theta)) {
        throw ValidationError("parameters must be finite");
    }
    // Strict inequalities, checked in a fixed order so the message is stable.
    if (!(p > 1.0)) throw ValidationError("p > 1 violated (p ≤ 1)");
    if (!(alpha1 - p + 1.0 > 0.0)) throw ValidationError("alpha1−p+1 ≤ 0");
    if (!(alpha0 >= alpha1 - p)) throw ValidationError("alpha0 ≥ alpha1−p violated (alpha0 < alpha1−p)");
    if (!(theta > alpha1 - p)) throw ValidationError("theta > alpha1−p violated (theta ≤ alpha1−p)");
    if (alpha0 < 0.0 || alpha1 < 0.0 || theta < 0.0) {
        throw ValidationError("alpha0, alpha1 and theta must be nonnegative");
    }
    return ParamSet{p, alpha0, alpha1, theta};
}

inline DerivedConstants derived_constants(const ParamSet& ps) {
    const double p = ps.p;
    const double a1 = ps.alpha1;
    const double th = ps.theta;
    const double q = a1 - p + 1.0;   // > 0
    const double d = th - a1 + p;    // > 0

    DerivedConstants dc;
    dc.params = ps;
    dc.p_star = (th + 1.0) * p / q;
    dc.s = q / (p * p - p);
    dc.n = d / (p - 1.0);
    dc.m = d / q;
    dc.c_hat = std::pow((th + 1.0) * std::pow(q / (p - 1.0), p - 1.0), (q / p) / d);
    dc.kappa = std::pow((p - 1.0) / q, (p - 1.0) / p);
    dc.beta_max = std::min((th + 1.0) / p, q / (p - 1.0));
    return dc;
}

inline IdentityReport check_identities(const DerivedConstants& dc) {
    const ParamSet& ps = dc.params;
    const double p = ps.p;
    const double a1 = ps.alpha1;
    const double th = ps.theta;
    const double s = dc.s, n = dc.n, m = dc.m, ps_ = dc.p_star;

    IdentityReport rep;
    rep.residuals = {
        std::abs(s * m / n - 1.0 / p),
        std::abs((n - s * m) - (th - a1 + p) / p),
        std::abs(s * ps_ - (th + 1.0) / (p - 1.0)),
        std::abs(s * p - (a1 - p + 1.0) / (p - 1.0)),
        std::abs((th - n * ps_ / m + 1.0) + (th + 1.0) / (p - 1.0)),
        std::abs((s - n / m) * ps_ + (th + 1.0)),
    };
    rep.residual = *std::max_element(rep.residuals.begin(), rep.residuals.end());
    rep.pass = rep.residual < 1e-12;
    return rep;
}

}  // namespace hslog
