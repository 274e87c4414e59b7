#pragma once

// Free entropy, free Fisher information, entropy dissipation, and the HWI
// diagnostic for grid densities.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/measures.hpp"
#include "loggas/metric_series.hpp"
#include "loggas/potential.hpp"
#include "loggas/transforms.hpp"

namespace loggas {

namespace detail {

// Exact integral of log|u - v + k| over the unit square, used as the cell-pair
// kernel of the logarithmic double integral: with x = (i+u)h, y = (j+v)h,
//   int int_{cell_i x cell_j} log|x-y| dx dy = h^2 (log h + g(|i-j|)).
// For k >= 1 the closed form is Phi(k) - Phi(k-1) with
//   Phi(a) = (1+a)^2/2 log(1+a) - (1+a)^2/4 - a^2/2 log a + a^2/4 - a,
// which loses precision to cancellation at large k, where the expansion
//   g(k) = log k - 1/(12 k^2) - 1/(60 k^4) - 1/(168 k^6) - 1/(360 k^8)
// is already accurate far below double roundoff.
inline double log_pair_kernel(std::size_t k) {
    if (k == 0) return -1.5;
    if (k <= 32) {
        auto phi = [](double a) {
            const double p = 1.0 + a;
            double s = 0.5 * p * p * std::log(p) - 0.25 * p * p + 0.25 * a * a - a;
            if (a > 0.0) s -= 0.5 * a * a * std::log(a);
            return s;
        };
        return phi(static_cast<double>(k)) - phi(static_cast<double>(k - 1));
    }
    const double k2 = static_cast<double>(k) * static_cast<double>(k);
    const double k4 = k2 * k2;
    return std::log(static_cast<double>(k)) - 1.0 / (12.0 * k2) - 1.0 / (60.0 * k4) -
           1.0 / (168.0 * k4 * k2) - 1.0 / (360.0 * k4 * k4);
}

inline std::vector<double> cell_masses(const GridDensity& mu) {
    const std::size_t m = mu.cells();
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = 0.5 * (mu.rho[i] + mu.rho[i + 1]) * mu.h();
    return w;
}

} // namespace detail

// Logarithmic double integral int int log|x-y| dmu dmu, computed against the
// piecewise-constant cell representation with every cell pair integrated exactly.
inline double log_energy(const GridDensity& mu) {
    const auto w = detail::cell_masses(mu);
    const std::size_t m = w.size();
    std::vector<double> g(m);
    for (std::size_t k = 0; k < m; ++k) g[k] = detail::log_pair_kernel(k);
    const double logh = std::log(mu.h());
    double mass = 0.0;
    for (const double wi : w) mass += wi;
    double diag = 0.0;
    for (const double wi : w) diag += wi * wi;
    double total = g[0] * diag;
    for (std::size_t k = 1; k < m; ++k) {
        double corr = 0.0;
        for (std::size_t i = 0; i + k < m; ++i) corr += w[i] * w[i + k];
        total += 2.0 * g[k] * corr;
    }
    return total + logh * mass * mass;
}

// int V dmu by the trapezoid rule.
inline double potential_moment(const GridDensity& mu, const Potential& v) {
    const std::size_t n = mu.rho.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double val = v.value(mu.node(i)) * mu.rho[i];
        s += (i == 0 || i == n - 1) ? 0.5 * val : val;
    }
    return s * mu.h();
}

// Sigma_V(mu) = -int int log|x-y| dmu dmu + int V dmu
inline double free_entropy(const GridDensity& mu, const Potential& v) {
    return -log_energy(mu) + potential_moment(mu, v);
}

// I_V(mu) = int (H mu - V'/2)^2 dmu
inline double fisher_info(const GridDensity& mu, const Potential& v) {
    const auto deriv = grid_derivative(mu);
    const std::size_t n = mu.rho.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mu.node(i);
        const double d = detail::hilbert_with_derivative(mu, deriv, x) - 0.5 * v.deriv(x);
        const double val = d * d * mu.rho[i];
        s += (i == 0 || i == n - 1) ? 0.5 * val : val;
    }
    return s * mu.h();
}

// ||grad_W Sigma_V(mu)||^2 = int (V' - 2 H mu)^2 dmu  (algebraically 4 I_V)
inline double grad_norm_sq(const GridDensity& mu, const Potential& v) {
    const auto deriv = grid_derivative(mu);
    const std::size_t n = mu.rho.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mu.node(i);
        const double d = v.deriv(x) - 2.0 * detail::hilbert_with_derivative(mu, deriv, x);
        const double val = d * d * mu.rho[i];
        s += (i == 0 || i == n - 1) ? 0.5 * val : val;
    }
    return s * mu.h();
}

struct EnergyReport {
    double sigma_V = 0.0;
    double sigma_V_relative = 0.0;
    double fisher_I_V = 0.0;
    double grad_norm_sq = 0.0;
};

inline EnergyReport energy_report(const GridDensity& mu, const Potential& v, double reference_sigma) {
    EnergyReport rep;
    rep.sigma_V = free_entropy(mu, v);
    rep.sigma_V_relative = rep.sigma_V - reference_sigma;
    rep.fisher_I_V = fisher_info(mu, v);
    rep.grad_norm_sq = loggas::grad_norm_sq(mu, v);
    return rep;
}

// Per interior slice of an equally spaced density trajectory: the centered
// difference d Sigma_V / dt, the dissipation candidate -2 I_V, and their ratio.
// The flow of the mean-field equation satisfies d Sigma_V / dt = -2 I_V, so the
// ratio column should sit at 1.
inline MetricSeries dissipation_check(const std::vector<GridDensity>& traj, const Potential& v, double dt,
                                      double t0 = 0.0) {
    if (traj.size() < 3) throw invalid_argument("dissipation_check: need at least 3 time slices");
    if (!(dt > 0.0)) throw invalid_argument("dissipation_check: dt must be positive");
    std::vector<double> sigma(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) sigma[i] = free_entropy(traj[i], v);
    MetricSeries out("dissipation", {"sigma_V", "dsigma_dt", "minus_two_I_V", "ratio"});
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
        const double ds = (sigma[i + 1] - sigma[i - 1]) / (2.0 * dt);
        const double m2 = -2.0 * fisher_info(traj[i], v);
        const double ratio = m2 != 0.0 ? ds / m2 : std::numeric_limits<double>::quiet_NaN();
        out.add_row(t0 + dt * static_cast<double>(i), {sigma[i], ds, m2, ratio});
    }
    return out;
}

struct HwiReport {
    double w2 = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
};

// HWI inequality: Sigma_V(mu1) - Sigma_V(mu2) <= W2 ||grad_W Sigma_V(mu1)|| - (K/2) W2^2
// where K is a convexity lower bound of V over the union of supports.
inline HwiReport hwi_check(const GridDensity& mu1, const GridDensity& mu2, const Potential& v, double K,
                           double tol = 1e-3, std::size_t q = 2048) {
    HwiReport rep;
    rep.w2 = wasserstein(2.0, mu1, mu2, q);
    rep.lhs = free_entropy(mu1, v) - free_entropy(mu2, v);
    rep.rhs = rep.w2 * std::sqrt(grad_norm_sq(mu1, v)) - 0.5 * K * rep.w2 * rep.w2;
    rep.slack = rep.rhs - rep.lhs;
    rep.pass = rep.slack >= -tol;
    return rep;
}

} // namespace loggas
