#pragma once

#include <array>
#include <cstddef>

#include <boost/math/quadrature/gauss.hpp>

namespace hslog {

// N-point Gauss–Legendre rule mapped to [0,1]. Nodes and weights come from
// Boost's tabulated rules; Boost stores only the nonnegative half.
template <std::size_t N>
struct UnitGaussRule {
    std::array<double, N> x{};
    std::array<double, N> w{};

    UnitGaussRule() {
        using G = boost::math::quadrature::gauss<double, N>;
        const auto& a = G::abscissa();
        const auto& wt = G::weights();
        std::size_t k = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0.0) {
                x[k] = 0.5;
                w[k++] = 0.5 * wt[i];
                continue;
            }
            x[k] = 0.5 * (1.0 - a[i]);
            w[k++] = 0.5 * wt[i];
            x[k] = 0.5 * (1.0 + a[i]);
            w[k++] = 0.5 * wt[i];
        }
    }
};

template <std::size_t N>
const UnitGaussRule<N>& unit_gauss() {
    static const UnitGaussRule<N> rule;
    return rule;
}

// ∫_a^b f with one N-point panel.
template <std::size_t N, class F>
double gauss_panel(double a, double b, F&& f) {
    const auto& g = unit_gauss<N>();
    const double h = b - a;
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) acc += g.w[i] * f(a + h * g.x[i]);
    return h * acc;
}

}  // namespace hslog
