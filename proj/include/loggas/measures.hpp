#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/numeric.hpp"

namespace loggas {

// Probability density sampled at M+1 uniform nodes on [a, b]; values are
// interpreted piecewise linearly. All quadrature against a GridDensity uses
// the trapezoid rule so that mass(), to_quantiles() and the energy
// functionals agree about what measure the object represents.
struct GridDensity {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> rho;

    GridDensity() = default;
    GridDensity(double lo, double hi, std::vector<double> values) : a(lo), b(hi), rho(std::move(values)) {
        if (!(a < b)) throw invalid_argument("GridDensity: need a < b");
        if (rho.size() < 2) throw invalid_argument("GridDensity: need at least 2 nodes");
        double peak = 0.0;
        for (double v : rho) peak = std::max(peak, std::abs(v));
        for (double& v : rho) {
            if (!(v >= -1e-12 * std::max(1.0, peak)))
                throw invalid_argument("GridDensity: negative density value");
            if (v < 0.0) v = 0.0;
        }
    }

    std::size_t cells() const { return rho.size() - 1; }
    double h() const { return (b - a) / static_cast<double>(cells()); }
    double node(std::size_t i) const { return a + h() * static_cast<double>(i); }

    double mass() const { return trapezoid(rho, h()); }

    void normalize() {
        const double m = mass();
        if (!(m > 0.0)) throw invalid_argument("GridDensity: cannot normalize zero mass");
        for (double& v : rho) v /= m;
    }

    // piecewise-linear evaluation, 0 outside [a, b]
    double operator()(double x) const {
        if (x < a || x > b) return 0.0;
        const double t = (x - a) / h();
        std::size_t i = static_cast<std::size_t>(t);
        if (i >= cells()) i = cells() - 1;
        const double frac = t - static_cast<double>(i);
        return rho[i] * (1.0 - frac) + rho[i + 1] * frac;
    }
};

// Values of the quantile function at midpoint levels (k - 1/2)/Q, k = 1..Q.
struct QuantileFunction {
    std::vector<double> v;

    QuantileFunction() = default;
    explicit QuantileFunction(std::vector<double> values) : v(std::move(values)) {
        if (v.empty()) throw invalid_argument("QuantileFunction: empty");
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (!(v[i] <= v[i + 1])) throw invalid_argument("QuantileFunction: must be nondecreasing");
    }

    std::size_t size() const { return v.size(); }
    double level(std::size_t k) const { return (static_cast<double>(k) + 0.5) / static_cast<double>(v.size()); }
};

// Invert the piecewise-quadratic CDF of a piecewise-linear density at the
// midpoint levels. Exact (up to roundoff) whenever the density really is
// piecewise linear on the grid.
inline QuantileFunction to_quantiles(const GridDensity& mu, std::size_t q) {
    if (q == 0) throw invalid_argument("to_quantiles: q must be positive");
    const std::size_t m = mu.cells();
    const double h = mu.h();
    std::vector<double> cdf(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) cdf[i + 1] = cdf[i] + 0.5 * h * (mu.rho[i] + mu.rho[i + 1]);
    const double total = cdf.back();
    if (!(total > 0.0)) throw invalid_argument("to_quantiles: zero-mass density");

    std::vector<double> out(q);
    std::size_t cell = 0;
    for (std::size_t k = 0; k < q; ++k) {
        const double level = total * (static_cast<double>(k) + 0.5) / static_cast<double>(q);
        while (cell + 1 < m && cdf[cell + 1] <= level) ++cell;
        // solve rho_i t + (rho_{i+1}-rho_i) t^2 / (2h) = level - cdf_i on [0, h]
        const double c = std::max(0.0, level - cdf[cell]);
        const double r0 = mu.rho[cell];
        const double slope = (mu.rho[cell + 1] - mu.rho[cell]) / h;
        double t;
        const double disc = r0 * r0 + 2.0 * slope * c;
        const double denom = r0 + std::sqrt(std::max(0.0, disc));
        if (denom > 0.0) {
            t = 2.0 * c / denom;
        } else if (slope < 0.0 && c > 0.0) {
            t = h; // degenerate wedge: all remaining mass sits at the far node
        } else {
            t = 0.0;
        }
        t = std::clamp(t, 0.0, h);
        out[k] = mu.node(cell) + t;
    }
    return QuantileFunction(std::move(out));
}

// Empirical staircase quantiles of an atomic measure given by sorted positions.
inline QuantileFunction to_quantiles(const std::vector<double>& sorted_positions, std::size_t q) {
    if (sorted_positions.empty()) throw invalid_argument("to_quantiles: empty sample");
    if (q == 0) throw invalid_argument("to_quantiles: q must be positive");
    const std::size_t n = sorted_positions.size();
    std::vector<double> out(q);
    for (std::size_t k = 0; k < q; ++k) {
        const double level = (static_cast<double>(k) + 0.5) / static_cast<double>(q);
        std::size_t j = static_cast<std::size_t>(level * static_cast<double>(n));
        if (j >= n) j = n - 1;
        out[k] = sorted_positions[j];
    }
    return QuantileFunction(std::move(out));
}

// Order-p Wasserstein distance via the quantile coupling (1-d optimal
// transport): W_p^p = mean over midpoint levels of |q_mu - q_nu|^p.
inline double wasserstein(double p, const QuantileFunction& mu, const QuantileFunction& nu) {
    if (!(p >= 1.0)) throw invalid_argument("wasserstein: p must be >= 1");
    if (mu.size() != nu.size())
        throw invalid_argument("wasserstein: quantile grids must have equal size");
    double s = 0.0;
    if (p == 2.0) {
        for (std::size_t k = 0; k < mu.size(); ++k) {
            const double d = mu.v[k] - nu.v[k];
            s += d * d;
        }
    } else if (p == 1.0) {
        for (std::size_t k = 0; k < mu.size(); ++k) s += std::abs(mu.v[k] - nu.v[k]);
    } else {
        for (std::size_t k = 0; k < mu.size(); ++k) s += std::pow(std::abs(mu.v[k] - nu.v[k]), p);
    }
    return std::pow(s / static_cast<double>(mu.size()), 1.0 / p);
}

inline double wasserstein(double p, const GridDensity& mu, const GridDensity& nu, std::size_t q = 2048) {
    return wasserstein(p, to_quantiles(mu, q), to_quantiles(nu, q));
}

inline double silverman_bandwidth(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) throw invalid_argument("silverman_bandwidth: need at least 2 samples");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (!(sd > 0.0)) throw invalid_argument("silverman_bandwidth: degenerate sample");
    return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

// Gaussian kernel density estimate on a uniform grid covering
// [min - 3h, max + 3h], normalized to unit trapezoid mass.
inline GridDensity kde_density(const std::vector<double>& xs, std::size_t m = 4096,
                               std::optional<double> bandwidth = std::nullopt) {
    if (xs.empty()) throw invalid_argument("kde_density: empty sample");
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(xs);
    if (!(h > 0.0)) throw invalid_argument("kde_density: bandwidth must be > 0");
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    const double a = *mn - 3.0 * h;
    const double b = *mx + 3.0 * h;
    std::vector<double> rho(m + 1, 0.0);
    const double inv = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi) * static_cast<double>(xs.size()));
    const double dx = (b - a) / static_cast<double>(m);
    for (std::size_t i = 0; i <= m; ++i) {
        const double x = a + dx * static_cast<double>(i);
        double s = 0.0;
        for (double xi : xs) {
            const double u = (x - xi) / h;
            s += std::exp(-0.5 * u * u);
        }
        rho[i] = s * inv;
    }
    GridDensity out(a, b, std::move(rho));
    out.normalize();
    return out;
}

// Kernel-density reconstruction of a particle configuration (Silverman's rule
// unless a bandwidth is supplied).
inline GridDensity density_from_particles(const std::vector<double>& xs, std::size_t m = 4096,
                                          std::optional<double> bandwidth = std::nullopt) {
    return kde_density(xs, m, bandwidth);
}

// Density reconstruction from quantile values via monotone cubic
// interpolation of the CDF; smooth and mass-exact, used where downstream
// transforms need a well-behaved density (Stieltjes/Burgers pipelines).
inline GridDensity densify_quantiles_cdf(const QuantileFunction& qf, std::size_t m = 4096) {
    const std::size_t q = qf.size();
    if (q < 3) throw invalid_argument("densify_quantiles_cdf: need at least 3 quantiles");
    const double gap_lo = qf.v[1] - qf.v[0];
    const double gap_hi = qf.v[q - 1] - qf.v[q - 2];
    const double a = qf.v.front() - 0.5 * std::max(gap_lo, 1e-300);
    const double b = qf.v.back() + 0.5 * std::max(gap_hi, 1e-300);

    std::vector<double> xs, fs;
    xs.reserve(q + 2);
    fs.reserve(q + 2);
    xs.push_back(a);
    fs.push_back(0.0);
    for (std::size_t k = 0; k < q; ++k) {
        const double level = qf.level(k);
        if (qf.v[k] > xs.back()) {
            xs.push_back(qf.v[k]);
            fs.push_back(level);
        } else {
            fs.back() = level; // coincident quantiles: keep the upper CDF value
        }
    }
    if (b > xs.back()) {
        xs.push_back(b);
        fs.push_back(1.0);
    } else {
        fs.back() = 1.0;
    }
    if (xs.size() < 4) throw invalid_argument("densify_quantiles_cdf: degenerate quantile grid");

    Pchip cdf(std::move(xs), std::move(fs));
    std::vector<double> rho(m + 1);
    const double dx = (b - a) / static_cast<double>(m);
    for (std::size_t i = 0; i <= m; ++i) rho[i] = std::max(0.0, cdf.deriv(a + dx * static_cast<double>(i)));
    GridDensity out(a, b, std::move(rho));
    out.normalize();
    return out;
}

// Gap-based density at the particles, one 1-2-1 smoothing pass, linear
// interpolation onto a uniform grid. Crude but cheap; used for reporting the
// energy functionals along particle trajectories.
inline GridDensity densify_quantiles_gap(const QuantileFunction& qf, std::size_t m = 4096) {
    const std::size_t q = qf.size();
    if (q < 3) throw invalid_argument("densify_quantiles_gap: need at least 3 quantiles");
    const auto& x = qf.v;
    std::vector<double> rho(q);
    const double qd = static_cast<double>(q);
    for (std::size_t i = 0; i < q; ++i) {
        double width;
        if (i == 0)
            width = x[1] - x[0];
        else if (i == q - 1)
            width = x[q - 1] - x[q - 2];
        else
            width = 0.5 * (x[i + 1] - x[i - 1]);
        if (!(width > 0.0)) throw invalid_argument("densify_quantiles_gap: coincident quantiles");
        rho[i] = 1.0 / (qd * width);
    }
    std::vector<double> sm(rho);
    for (std::size_t i = 1; i + 1 < q; ++i) sm[i] = 0.25 * (rho[i - 1] + 2.0 * rho[i] + rho[i + 1]);

    const double a = x.front() - 0.5 * (x[1] - x[0]);
    const double b = x.back() + 0.5 * (x[q - 1] - x[q - 2]);
    std::vector<double> grid(m + 1, 0.0);
    const double dx = (b - a) / static_cast<double>(m);
    std::size_t j = 0;
    for (std::size_t i = 0; i <= m; ++i) {
        const double xi = a + dx * static_cast<double>(i);
        if (xi <= x.front()) {
            const double t = (xi - a) / (x.front() - a);
            grid[i] = sm.front() * std::max(0.0, t);
        } else if (xi >= x.back()) {
            const double t = (b - xi) / (b - x.back());
            grid[i] = sm.back() * std::max(0.0, t);
        } else {
            while (j + 2 < q && x[j + 1] < xi) ++j;
            while (j > 0 && x[j] > xi) --j;
            const double t = (xi - x[j]) / (x[j + 1] - x[j]);
            grid[i] = sm[j] * (1.0 - t) + sm[j + 1] * t;
        }
    }
    GridDensity out(a, b, std::move(grid));
    out.normalize();
    return out;
}

inline void write_density_csv(std::ostream& os, const GridDensity& mu) {
    os << "x,rho\n";
    for (std::size_t i = 0; i < mu.rho.size(); ++i)
        os << format_double(mu.node(i)) << ',' << format_double(mu.rho[i]) << '\n';
}

} // namespace loggas
