#pragma once

// Hilbert and Stieltjes transforms of grid densities, and the complex-Burgers
// residual used to check the evolution of the Stieltjes transform.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/measures.hpp"
#include "loggas/metric_series.hpp"

namespace loggas {

// Nodal derivative of a grid density by centered differences (one-sided at the ends).
inline std::vector<double> grid_derivative(const GridDensity& mu) {
    const std::size_t n = mu.rho.size();
    const double h = mu.h();
    std::vector<double> d(n);
    d[0] = (mu.rho[1] - mu.rho[0]) / h;
    d[n - 1] = (mu.rho[n - 1] - mu.rho[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (mu.rho[i + 1] - mu.rho[i - 1]) / (2.0 * h);
    return d;
}

namespace detail {

inline double interp_nodes(const GridDensity& mu, const std::vector<double>& vals, double x) {
    if (x <= mu.a) return vals.front();
    if (x >= mu.b) return vals.back();
    const double s = (x - mu.a) / mu.h();
    const auto i = static_cast<std::size_t>(s);
    const double t = s - static_cast<double>(i);
    if (i + 1 >= vals.size()) return vals.back();
    return vals[i] * (1.0 - t) + vals[i + 1] * t;
}

// Principal-value Hilbert transform H rho(x) = pv-int rho(y)/(x-y) dy with the
// second-order singularity subtraction
//   pv-int rho/(x-y) = int [rho(y)-rho(x)-rho'(x)(y-x)]/(x-y) dy
//                      + rho(x) log((x-a)/(b-x)) - rho'(x) (b-a)
// whose remaining integrand vanishes at y = x and is handled by the trapezoid rule.
inline double hilbert_with_derivative(const GridDensity& mu, const std::vector<double>& deriv, double x) {
    const std::size_t n = mu.rho.size();
    const double h = mu.h();
    const double tiny = 1e-12 * (mu.b - mu.a);
    if (x > mu.a + tiny && x < mu.b - tiny) {
        const double rx = mu(x);
        const double dx = interp_nodes(mu, deriv, x);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = mu.node(i);
            const double d = x - y;
            const double val = std::abs(d) < tiny ? 0.0 : (mu.rho[i] - rx + dx * d) / d;
            sum += (i == 0 || i == n - 1) ? 0.5 * val : val;
        }
        return sum * h + rx * std::log((x - mu.a) / (mu.b - x)) - dx * (mu.b - mu.a);
    }
    // outside (or on the edge of) the grid the integrand is regular wherever rho
    // vanishes toward the evaluation point
    const double dx = interp_nodes(mu, deriv, x);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x - mu.node(i);
        const double val = std::abs(d) < tiny ? -dx : mu.rho[i] / d;
        sum += (i == 0 || i == n - 1) ? 0.5 * val : val;
    }
    return sum * h;
}

} // namespace detail

inline double hilbert(const GridDensity& mu, double x) {
    const auto deriv = grid_derivative(mu);
    return detail::hilbert_with_derivative(mu, deriv, x);
}

inline std::vector<double> hilbert_grid(const GridDensity& mu, const std::vector<double>& xs) {
    const auto deriv = grid_derivative(mu);
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = detail::hilbert_with_derivative(mu, deriv, xs[i]);
    return out;
}

// Hilbert transform of the empirical measure of `xs` evaluated at each particle,
// excluding the self-interaction: (1/N) sum_{j != i} 1/(x_i - x_j).
inline std::vector<double> hilbert_at_particles(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n == 0) throw invalid_argument("hilbert_at_particles: empty configuration");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = xs[i] - xs[j];
            if (d == 0.0) throw domain_error("hilbert_at_particles: coincident particles");
            s += 1.0 / d;
        }
        out[i] = s / static_cast<double>(n);
    }
    return out;
}

// Stieltjes transform G(z) = int rho(y)/(z-y) dy, z off the support.
inline std::complex<double> stieltjes(const GridDensity& mu, std::complex<double> z) {
    if (z.imag() == 0.0 && z.real() >= mu.a - mu.h() && z.real() <= mu.b + mu.h())
        throw domain_error("stieltjes: z on the support of the measure");
    const std::size_t n = mu.rho.size();
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> val = mu.rho[i] / (z - mu.node(i));
        sum += (i == 0 || i == n - 1) ? 0.5 * val : val;
    }
    return sum * mu.h();
}

// Stieltjes transform of an empirical measure: G(z) = (1/N) sum_i 1/(z - x_i).
inline std::complex<double> stieltjes(const std::vector<double>& xs, std::complex<double> z) {
    if (z.imag() == 0.0) throw domain_error("stieltjes: z must lie off the real axis");
    if (xs.empty()) throw invalid_argument("stieltjes: empty configuration");
    std::complex<double> sum = 0.0;
    for (const double x : xs) sum += 1.0 / (z - x);
    return sum / static_cast<double>(xs.size());
}

// One row of a Stieltjes-transform scan, as recorded by experiments.
struct StieltjesSample {
    std::complex<double> z;
    std::complex<double> g;
};

// Residual of the complex Burgers equation
//   dG/dt = (-G + theta z) dG/dz + theta G
// satisfied by the Stieltjes transform of the mean-field flow with V = theta x^2.
// Time derivative: centered difference across the three density slices (spacing dt);
// z derivative: centered difference with real offset dz (valid by analyticity).
inline double burgers_residual(const GridDensity& before, const GridDensity& mid, const GridDensity& after,
                               double dt, std::complex<double> z, double dz, double theta) {
    if (!(dt > 0.0) || !(dz > 0.0)) throw invalid_argument("burgers_residual: dt and dz must be positive");
    const std::complex<double> g = stieltjes(mid, z);
    const std::complex<double> gz = (stieltjes(mid, z + dz) - stieltjes(mid, z - dz)) / (2.0 * dz);
    const std::complex<double> gt = (stieltjes(after, z) - stieltjes(before, z)) / (2.0 * dt);
    return std::abs(gt - (-g + theta * z) * gz - theta * g);
}

// Residual table over a whole trajectory of equally spaced density slices and a
// z grid, one row per interior slice per z point (endpoints are excluded since
// the time derivative is centered).
inline MetricSeries burgers_residual(const std::vector<GridDensity>& traj, double theta,
                                     const std::vector<std::complex<double>>& zs, double dt, double dz = 0.02,
                                     double t0 = 0.0) {
    if (traj.size() < 3) throw invalid_argument("burgers_residual: need at least 3 time slices");
    if (zs.empty()) throw invalid_argument("burgers_residual: empty z grid");
    MetricSeries out("burgers_residual", {"z_re", "z_im", "residual"});
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double time = t0 + dt * static_cast<double>(i);
        for (const auto& z : zs)
            out.add_row(time, {z.real(), z.imag(),
                               burgers_residual(traj[i - 1], traj[i], traj[i + 1], dt, z, dz, theta)});
    }
    return out;
}

} // namespace loggas
