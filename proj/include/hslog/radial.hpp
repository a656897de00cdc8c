#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "params.hpp"
#include "quadrature.hpp"

namespace hslog {

// A quadrature point inside cell `cell`. Cell k ≥ 1 spans [r_{k-1}, r_k] and a
// piecewise-linear profile there equals (1-t)·v[k-1] + t·v[k]. Cell 0 is
// (0, r_0), where profiles are frozen at v[0].
struct QuadPoint {
    double r = 0.0;
    double weight = 0.0;
    std::size_t cell = 0;
    double t = 1.0;
};

// Nodes r_0 < ... < r_{M-1} = 1 (zero-based). Copies share the immutable data.
class Grid {
public:
    Grid() = default;

    static Grid from_nodes(std::vector<double> nodes, double gamma = 0.0) {
        if (nodes.size() < 2) throw ValidationError("grid needs at least 2 nodes");
        if (!(nodes.front() > 0.0)) throw ValidationError("grid: first node must be positive");
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            if (!(nodes[i] > nodes[i - 1])) throw ValidationError("grid nodes must be strictly increasing");
        }
        if (std::abs(nodes.back() - 1.0) > 1e-12) throw ValidationError("grid must end at r = 1");
        nodes.back() = 1.0;

        auto d = std::make_shared<Data>();
        d->gamma = gamma;
        d->nodes = std::move(nodes);
        const auto& g = unit_gauss<4>();
        d->quad.reserve(4 * (d->nodes.size() - 1));
        for (std::size_t k = 1; k < d->nodes.size(); ++k) {
            const double a = d->nodes[k - 1];
            const double h = d->nodes[k] - a;
            for (std::size_t q = 0; q < 4; ++q) {
                d->quad.push_back(QuadPoint{a + h * g.x[q], h * g.w[q], k, g.x[q]});
            }
        }
        Grid out;
        out.d_ = std::move(d);
        return out;
    }

    std::size_t size() const { return d_->nodes.size(); }
    double r(std::size_t i) const { return d_->nodes[i]; }
    const std::vector<double>& nodes() const { return d_->nodes; }
    const std::vector<QuadPoint>& quad() const { return d_->quad; }
    double gamma() const { return d_->gamma; }
    bool same_as(const Grid& o) const { return d_ == o.d_ || d_->nodes == o.d_->nodes; }

    // Cell containing r in (0,1]; cell 0 for r ≤ r_0.
    std::size_t cell_of(double r) const {
        const auto& x = d_->nodes;
        if (r <= x.front()) return 0;
        auto it = std::lower_bound(x.begin(), x.end(), r);
        if (it == x.end()) return x.size() - 1;
        return static_cast<std::size_t>(it - x.begin());
    }

private:
    struct Data {
        std::vector<double> nodes;
        std::vector<QuadPoint> quad;
        double gamma = 0.0;
    };
    std::shared_ptr<const Data> d_;
};

inline Grid make_grid(int M, double gamma) {
    if (M < 2) throw ValidationError("grid: M too small (need M ≥ 2)");
    if (!(gamma >= 1.0)) throw ValidationError("grid: gamma must be ≥ 1");
    std::vector<double> nodes(static_cast<std::size_t>(M));
    for (int i = 1; i <= M; ++i) nodes[i - 1] = std::pow(static_cast<double>(i) / M, gamma);
    nodes.back() = 1.0;
    return Grid::from_nodes(std::move(nodes), gamma);
}

// ∫_lo^hi r^w dr without cancellation when hi/lo is close to 1.
inline double power_cell_integral(double lo, double hi, double w) {
    const double e = w + 1.0;
    if (lo <= 0.0) return std::pow(hi, e) / e;
    return std::pow(lo, e) * std::expm1(e * std::log(hi / lo)) / e;
}

class Profile {
public:
    Profile() = default;
    Profile(Grid g, std::vector<double> values) : grid_(std::move(g)), v_(std::move(values)) {
        if (v_.size() != grid_.size()) throw ValidationError("profile size does not match grid");
        for (double x : v_) {
            if (!std::isfinite(x)) throw ValidationError("profile values must be finite");
        }
    }

    template <class F>
    static Profile sample(const Grid& g, F&& f) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.r(i));
        return Profile(g, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return v_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    double value_at_origin() const { return v_.front(); }

    double at(const QuadPoint& q) const {
        if (q.cell == 0) return v_[0];
        return (1.0 - q.t) * v_[q.cell - 1] + q.t * v_[q.cell];
    }

    // Slope on cell k ≥ 1; cell 0 is flat.
    double slope(std::size_t k) const {
        if (k == 0) return 0.0;
        return (v_[k] - v_[k - 1]) / (grid_.r(k) - grid_.r(k - 1));
    }

    double operator()(double r) const {
        const std::size_t k = grid_.cell_of(r);
        if (k == 0) return v_[0];
        const double a = grid_.r(k - 1);
        const double t = (r - a) / (grid_.r(k) - a);
        return (1.0 - t) * v_[k - 1] + t * v_[k];
    }

    Profile scaled(double c) const {
        std::vector<double> v(v_);
        for (double& x : v) x *= c;
        return Profile(grid_, std::move(v));
    }

    Profile plus(const Profile& o, double c = 1.0) const {
        if (!grid_.same_as(o.grid_)) throw ValidationError("profiles live on different grids");
        std::vector<double> v(v_);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * o.v_[i];
        return Profile(grid_, std::move(v));
    }

private:
    Grid grid_;
    std::vector<double> v_;
};

inline void require_integrable(double w) {
    if (!(w > -1.0)) throw ValidationError("weight exponent must be > -1 (non-integrable weight)");
}

// ∫_0^1 r^w f dr where f is evaluated at quadrature points. The first cell uses
// the value at r_0 and the exact ∫_0^{r_0} r^w dr.
template <class F>
double weighted_integral(const Grid& g, double w, F&& f) {
    require_integrable(w);
    const double r0 = g.r(0);
    double acc = f(QuadPoint{r0, 0.0, 0, 1.0}) * std::pow(r0, w + 1.0) / (w + 1.0);
    for (const QuadPoint& q : g.quad()) acc += q.weight * std::pow(q.r, w) * f(q);
    return acc;
}

inline double weighted_integral(const Grid& g, const std::vector<double>& f, double w) {
    if (f.size() != g.size()) throw ValidationError("nodal data size does not match grid");
    return weighted_integral(g, w, [&](const QuadPoint& q) {
        if (q.cell == 0) return f[0];
        return (1.0 - q.t) * f[q.cell - 1] + q.t * f[q.cell];
    });
}

// ∫_0^x r^w f dr with the same rule; the cell containing x is integrated over
// its truncated part. Differences of this primitive are exactly additive.
template <class F>
double weighted_primitive(const Grid& g, double w, double x, F&& f) {
    require_integrable(w);
    if (x <= 0.0) return 0.0;
    x = std::min(x, 1.0);
    const double r0 = g.r(0);
    const double f0 = f(QuadPoint{r0, 0.0, 0, 1.0});
    if (x <= r0) return f0 * std::pow(x, w + 1.0) / (w + 1.0);
    double acc = f0 * std::pow(r0, w + 1.0) / (w + 1.0);
    const std::size_t kx = g.cell_of(x);
    const auto& quad = g.quad();
    for (std::size_t i = 0; i < 4 * (kx - 1); ++i) {
        const QuadPoint& q = quad[i];
        acc += q.weight * std::pow(q.r, w) * f(q);
    }
    const double a = g.r(kx - 1);
    const double h = g.r(kx) - a;
    const double hx = x - a;
    const auto& gl = unit_gauss<4>();
    for (std::size_t j = 0; j < 4; ++j) {
        const double r = a + hx * gl.x[j];
        acc += hx * gl.w[j] * std::pow(r, w) * f(QuadPoint{r, hx * gl.w[j], kx, (r - a) / h});
    }
    return acc;
}

inline double dirichlet_energy(const Profile& u, const ParamSet& ps) {
    const Grid& g = u.grid();
    double acc = 0.0;
    for (std::size_t k = 1; k < g.size(); ++k) {
        const double s = std::abs(u.slope(k));
        if (s == 0.0) continue;
        acc += power_cell_integral(g.r(k - 1), g.r(k), ps.alpha1) * std::pow(s, ps.p);
    }
    return acc;
}

inline double dirichlet_norm(const Profile& u, const ParamSet& ps) {
    return std::pow(dirichlet_energy(u, ps), 1.0 / ps.p);
}

// ∫_{r_a}^1 r^{α1}|u'|^p over whole cells beyond r_a plus the clipped cell.
inline double tail_energy(const Profile& u, const ParamSet& ps, double ra) {
    const Grid& g = u.grid();
    double acc = 0.0;
    for (std::size_t k = 1; k < g.size(); ++k) {
        const double hi = g.r(k);
        if (hi <= ra) continue;
        const double lo = std::max(g.r(k - 1), ra);
        const double s = std::abs(u.slope(k));
        if (s == 0.0) continue;
        acc += power_cell_integral(lo, hi, ps.alpha1) * std::pow(s, ps.p);
    }
    return acc;
}

inline double lq_norm(const Profile& u, double q, double w) {
    if (!(q >= 1.0)) throw ValidationError("lq_norm: q must be ≥ 1");
    const double I = weighted_integral(u.grid(), w, [&](const QuadPoint& x) {
        return std::pow(std::abs(u.at(x)), q);
    });
    return std::pow(I, 1.0 / q);
}

inline Profile normalize(const Profile& u, const ParamSet& ps) {
    const double nrm = dirichlet_norm(u, ps);
    if (!(nrm > 0.0)) throw ValidationError("cannot normalize a profile with zero Dirichlet norm");
    return u.scaled(1.0 / nrm);
}

struct PointwiseBoundReport {
    double worst_slack = 0.0;
    std::size_t worst_index = 0;
    bool pass = true;
};

// |u(r)| ≤ [((p-1)/(α1-p+1))(1 - r^{(α1-p+1)/(p-1)})]^{(p-1)/p} ‖u‖ r^{-(α1-p+1)/p}
inline double pointwise_bound(double r, double norm, const ParamSet& ps) {
    const double p = ps.p;
    const double q = ps.alpha1 - p + 1.0;
    const double one_minus = -std::expm1((q / (p - 1.0)) * std::log(r));
    return std::pow(((p - 1.0) / q) * one_minus, (p - 1.0) / p) * norm * std::pow(r, -q / p);
}

inline PointwiseBoundReport pointwise_bound_check(const Profile& u, const ParamSet& ps) {
    const double nrm = dirichlet_norm(u, ps);
    const Grid& g = u.grid();
    PointwiseBoundReport rep;
    rep.worst_slack = INFINITY;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double slack = pointwise_bound(g.r(i), nrm, ps) - std::abs(u[i]);
        if (slack < rep.worst_slack) {
            rep.worst_slack = slack;
            rep.worst_index = i;
        }
    }
    rep.pass = rep.worst_slack >= -1e-12;
    return rep;
}

inline std::string format_real(double x, int digits = 12) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

inline void write_profile_csv(std::ostream& os, const Profile& u) {
    os << "r,u\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
        os << format_real(u.grid().r(i)) << ',' << format_real(u[i]) << '\n';
    }
}

inline Profile read_profile_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("profile CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "r,u") throw ValidationError("profile CSV must start with header \"r,u\"");
    std::vector<double> r, v;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ValidationError("profile CSV line " + std::to_string(lineno) + ": expected two columns");
        }
        try {
            std::size_t used = 0;
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            r.push_back(std::stod(a, &used));
            if (used != a.size()) throw std::invalid_argument(a);
            v.push_back(std::stod(b, &used));
            if (used != b.size()) throw std::invalid_argument(b);
        } catch (const std::logic_error&) {
            throw ValidationError("profile CSV line " + std::to_string(lineno) + ": not a number");
        }
    }
    Grid g = Grid::from_nodes(std::move(r));
    return Profile(g, std::move(v));
}

}  // namespace hslog
