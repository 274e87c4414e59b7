#pragma once

// Closed-form equilibrium measures for quadratic and quartic confinement, and the
// Euler-Lagrange residual V'(x) - 2 H rho(x) that certifies a density as the
// minimizer of the free entropy.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/measures.hpp"
#include "loggas/potential.hpp"
#include "loggas/transforms.hpp"

namespace loggas {

enum class EquilibriumFamily { semicircle, one_cut_quartic, two_cut_quartic };

// Analytic description of the equilibrium measure.
//
//   V = theta x^2 (theta > 0):
//     scaled semicircle, rho(x) = sqrt(4 s^2 - x^2) / (2 pi s^2), s^2 = 1/(2 theta)
//   V = x^4/4 + c x^2/2, c >= -2 (one cut):
//     rho(x) = (x^2/2 + b0) sqrt(A^2 - x^2) / pi,
//     A^2 = (2/3)(sqrt(c^2+12) - c),  b0 = (2c + sqrt(c^2+12))/6
//   V = x^4/4 + c x^2/2, c < -2 (two cuts):
//     rho(x) = |x| sqrt((x^2 - A^2)(B^2 - x^2)) / (2 pi),  A^2 = -2-c, B^2 = 2-c,
//     supported on [-B,-A] union [A,B]
struct EquilibriumSpec {
    EquilibriumFamily family = EquilibriumFamily::semicircle;
    std::vector<std::array<double, 2>> intervals; // support components, left to right
    double sigma = 1.0;                           // semicircle scale
    double a2 = 0.0, b2 = 0.0;                    // squared edges for the quartic families
    double b0 = 0.0;                              // one-cut polynomial offset

    double density(double x) const {
        switch (family) {
            case EquilibriumFamily::semicircle: {
                const double s = 4.0 * sigma * sigma - x * x;
                return s > 0.0 ? std::sqrt(s) / (2.0 * std::numbers::pi * sigma * sigma) : 0.0;
            }
            case EquilibriumFamily::one_cut_quartic: {
                const double s = a2 - x * x;
                return s > 0.0 ? (0.5 * x * x + b0) * std::sqrt(s) / std::numbers::pi : 0.0;
            }
            case EquilibriumFamily::two_cut_quartic: {
                const double u = x * x;
                const double s = (u - a2) * (b2 - u);
                return s > 0.0 ? std::abs(x) * std::sqrt(s) / (2.0 * std::numbers::pi) : 0.0;
            }
        }
        return 0.0;
    }

    // hull of the support
    double left() const { return intervals.front()[0]; }
    double right() const { return intervals.back()[1]; }
};

inline EquilibriumSpec equilibrium_spec(const Potential& v) {
    EquilibriumSpec spec;
    switch (v.kind()) {
        case PotentialKind::quadratic: {
            const double theta = v.theta();
            if (!(theta > 0.0)) throw domain_error("equilibrium_spec: quadratic confinement requires theta > 0");
            spec.family = EquilibriumFamily::semicircle;
            spec.sigma = 1.0 / std::sqrt(2.0 * theta);
            spec.intervals = {{-2.0 * spec.sigma, 2.0 * spec.sigma}};
            return spec;
        }
        case PotentialKind::quartic_double_well: {
            const double c = v.double_well_c();
            if (c >= -2.0) {
                const double s = std::sqrt(c * c + 12.0);
                spec.family = EquilibriumFamily::one_cut_quartic;
                spec.a2 = (2.0 / 3.0) * (s - c);
                spec.b0 = (2.0 * c + s) / 6.0;
                const double edge = std::sqrt(spec.a2);
                spec.intervals = {{-edge, edge}};
            } else {
                spec.family = EquilibriumFamily::two_cut_quartic;
                spec.a2 = -2.0 - c;
                spec.b2 = 2.0 - c;
                const double inner = std::sqrt(spec.a2), outer = std::sqrt(spec.b2);
                spec.intervals = {{-outer, -inner}, {inner, outer}};
            }
            return spec;
        }
        default:
            throw invalid_argument("equilibrium_spec: no closed form for potential kind '" +
                                   std::string(to_string(v.kind())) + "'");
    }
}

// Equilibrium density sampled on a uniform grid over the support hull with `m`
// cells, renormalized so the trapezoid mass is exactly 1.
inline GridDensity equilibrium_density(const Potential& v, std::size_t m = 4096) {
    const EquilibriumSpec spec = equilibrium_spec(v);
    const double lo = spec.left(), hi = spec.right();
    std::vector<double> rho(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m);
        rho[i] = spec.density(x);
    }
    GridDensity out(lo, hi, std::move(rho));
    out.normalize();
    return out;
}

// sup |V'(x) - 2 H rho(x)| over probe points in the inner 90% of each support
// component (the trim avoids the edge region where finite differencing of the
// square-root profile degrades).
inline double euler_lagrange_residual(const GridDensity& mu, const Potential& v,
                                      const std::vector<std::array<double, 2>>& intervals,
                                      std::size_t probes_per_interval = 200) {
    if (intervals.empty()) throw invalid_argument("euler_lagrange_residual: no support intervals");
    if (probes_per_interval < 2) throw invalid_argument("euler_lagrange_residual: need at least two probes");
    const auto deriv = grid_derivative(mu);
    double worst = 0.0;
    for (const auto& iv : intervals) {
        const double mid = 0.5 * (iv[0] + iv[1]);
        const double half = 0.45 * (iv[1] - iv[0]);
        for (std::size_t k = 0; k < probes_per_interval; ++k) {
            const double t = 2.0 * static_cast<double>(k) / static_cast<double>(probes_per_interval - 1) - 1.0;
            const double x = mid + half * t;
            const double res = v.deriv(x) - 2.0 * detail::hilbert_with_derivative(mu, deriv, x);
            worst = std::max(worst, std::abs(res));
        }
    }
    return worst;
}

// Residual against the potential's own closed-form support.
inline double euler_lagrange_residual(const GridDensity& mu, const Potential& v) {
    return euler_lagrange_residual(mu, v, equilibrium_spec(v).intervals);
}

} // namespace loggas
