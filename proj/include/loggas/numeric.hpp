#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "loggas/errors.hpp"

namespace loggas {

inline std::vector<double> linspace(double a, double b, std::size_t n_nodes) {
    if (n_nodes < 2) throw invalid_argument("linspace needs at least 2 nodes");
    std::vector<double> x(n_nodes);
    const double h = (b - a) / static_cast<double>(n_nodes - 1);
    for (std::size_t i = 0; i < n_nodes; ++i) x[i] = a + h * static_cast<double>(i);
    x.back() = b;
    return x;
}

inline double trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

// Shortest round-trip decimal representation; locale-free, so emitted CSV/JSON
// bytes are reproducible for identical doubles.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

// Monotone piecewise-cubic interpolant (Fritsch-Carlson slope limiting).
// Used to turn a sampled CDF into a density: the limiter guarantees the
// interpolated CDF is nondecreasing, hence the derivative is a valid density.
class Pchip {
public:
    Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw invalid_argument("Pchip: need >= 2 matching nodes");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw invalid_argument("Pchip: abscissae must increase strictly");
        d_.assign(n, 0.0);
        std::vector<double> h(n - 1), s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            s[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = s[0];
        } else {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                if (s[i - 1] * s[i] <= 0.0) {
                    d_[i] = 0.0;
                } else {
                    const double w1 = 2.0 * h[i] + h[i - 1];
                    const double w2 = h[i] + 2.0 * h[i - 1];
                    d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
                }
            }
            d_[0] = edge_slope(h[0], h[1], s[0], s[1]);
            d_[n - 1] = edge_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        }
    }

    double operator()(double xv) const { return eval(xv).first; }
    double deriv(double xv) const { return eval(xv).second; }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

private:
    static double edge_slope(double h0, double h1, double s0, double s1) {
        double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0) return 0.0;
        if (s0 * s1 <= 0.0 && std::abs(d) > 3.0 * std::abs(s0)) return 3.0 * s0;
        return d;
    }

    std::pair<double, double> eval(double xv) const {
        const std::size_t n = x_.size();
        if (xv <= x_.front()) return {y_.front(), 0.0};
        if (xv >= x_.back()) return {y_.back(), 0.0};
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(x_.begin(), x_.end(), xv) - x_.begin());
        i = std::min(std::max<std::size_t>(i, 1), n - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (xv - x_[i]) / h;
        const double y0 = y_[i], y1 = y_[i + 1], m0 = d_[i] * h, m1 = d_[i + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        const double value = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
                             (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
        const double dval = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
                             (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h;
        return {value, dval};
    }

    std::vector<double> x_, y_, d_;
};

} // namespace loggas
