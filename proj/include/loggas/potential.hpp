#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/numeric.hpp"

namespace loggas {

enum class PotentialKind { quadratic, quartic_double_well, polynomial, abs_power, poly_log };

inline const char* to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::quadratic: return "quadratic";
        case PotentialKind::quartic_double_well: return "quartic_double_well";
        case PotentialKind::polynomial: return "polynomial";
        case PotentialKind::abs_power: return "abs_power";
        case PotentialKind::poly_log: return "poly_log";
    }
    return "?";
}

// Confining potential V. Supported families:
//   quadratic(theta):            V = theta x^2
//   quartic_double_well(c):      V = x^4/4 + c x^2/2
//   polynomial(c0..cn):          V = sum c_k x^k
//   abs_power(a, p):             V = a |x|^p, a > 0, p >= 1
//   poly_log(coeffs, L):         V = poly(x) + L log|x|   (origin excluded)
// The poly_log family covers V = a x^4/12 - b x^2/2 - c log|x| via
// kontsevich_penner(a, b, c).
class Potential {
public:
    static Potential quadratic(double theta) {
        Potential v(PotentialKind::quadratic);
        v.theta_ = theta;
        return v;
    }

    static Potential quartic_double_well(double c) {
        Potential v(PotentialKind::quartic_double_well);
        v.c_ = c;
        return v;
    }

    static Potential polynomial(std::vector<double> coeffs) {
        Potential v(PotentialKind::polynomial);
        while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
        v.coeffs_ = std::move(coeffs);
        if (v.coeffs_.empty()) v.coeffs_.push_back(0.0);
        return v;
    }

    static Potential abs_power(double a, double p) {
        if (!(a > 0.0)) throw invalid_argument("abs_power: a must be > 0");
        if (!(p >= 1.0)) throw invalid_argument("abs_power: p must be >= 1");
        Potential v(PotentialKind::abs_power);
        v.a_ = a;
        v.p_ = p;
        return v;
    }

    static Potential poly_log(std::vector<double> coeffs, double log_coeff) {
        Potential v = polynomial(std::move(coeffs));
        v.kind_ = PotentialKind::poly_log;
        v.log_coeff_ = log_coeff;
        return v;
    }

    static Potential kontsevich_penner(double a, double b, double c) {
        return poly_log({0.0, 0.0, -b / 2.0, 0.0, a / 12.0}, -c);
    }

    static Potential zero() { return polynomial({0.0}); }

    PotentialKind kind() const { return kind_; }
    bool has_log_term() const { return kind_ == PotentialKind::poly_log && log_coeff_ != 0.0; }
    double theta() const { return theta_; }
    double double_well_c() const { return c_; }
    double log_coeff() const { return log_coeff_; }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double power_scale() const { return a_; }
    double power_exponent() const { return p_; }

    bool is_zero() const {
        if (kind_ == PotentialKind::polynomial) {
            for (double c : coeffs_)
                if (c != 0.0) return false;
            return true;
        }
        if (kind_ == PotentialKind::quadratic) return theta_ == 0.0;
        return false;
    }

    double value(double x) const {
        switch (kind_) {
            case PotentialKind::quadratic: return theta_ * x * x;
            case PotentialKind::quartic_double_well: {
                const double x2 = x * x;
                return 0.25 * x2 * x2 + 0.5 * c_ * x2;
            }
            case PotentialKind::polynomial: return horner(x);
            case PotentialKind::abs_power: return a_ * std::pow(std::abs(x), p_);
            case PotentialKind::poly_log:
                check_origin(x);
                return horner(x) + log_coeff_ * std::log(std::abs(x));
        }
        return 0.0;
    }

    double eval(double x) const { return value(x); }

    double deriv(double x) const {
        switch (kind_) {
            case PotentialKind::quadratic: return 2.0 * theta_ * x;
            case PotentialKind::quartic_double_well: return x * x * x + c_ * x;
            case PotentialKind::polynomial: return horner_d1(x);
            case PotentialKind::abs_power:
                if (x == 0.0) return 0.0;
                return a_ * p_ * sign(x) * std::pow(std::abs(x), p_ - 1.0);
            case PotentialKind::poly_log:
                check_origin(x);
                return horner_d1(x) + log_coeff_ / x;
        }
        return 0.0;
    }

    double deriv2(double x) const {
        switch (kind_) {
            case PotentialKind::quadratic: return 2.0 * theta_;
            case PotentialKind::quartic_double_well: return 3.0 * x * x + c_;
            case PotentialKind::polynomial: return horner_d2(x);
            case PotentialKind::abs_power:
                if (x == 0.0) {
                    if (p_ > 2.0) return 0.0;
                    if (p_ == 2.0) return 2.0 * a_;
                    throw domain_error("abs_power: V'' singular at the origin for p < 2");
                }
                return a_ * p_ * (p_ - 1.0) * std::pow(std::abs(x), p_ - 2.0);
            case PotentialKind::poly_log:
                check_origin(x);
                return horner_d2(x) - log_coeff_ / (x * x);
        }
        return 0.0;
    }

private:
    explicit Potential(PotentialKind k) : kind_(k) {}

    static double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

    void check_origin(double x) const {
        if (x == 0.0 && log_coeff_ != 0.0)
            throw domain_error("potential with log term evaluated at the origin");
    }

    double horner(double x) const {
        double v = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) v = v * x + coeffs_[i];
        return v;
    }

    double horner_d1(double x) const {
        double v = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 1;) v = v * x + coeffs_[i] * static_cast<double>(i);
        return v;
    }

    double horner_d2(double x) const {
        double v = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 2;)
            v = v * x + coeffs_[i] * static_cast<double>(i) * static_cast<double>(i - 1);
        return v;
    }

    PotentialKind kind_;
    double theta_ = 0.0;
    double c_ = 0.0;
    double a_ = 0.0;
    double p_ = 0.0;
    double log_coeff_ = 0.0;
    std::vector<double> coeffs_;
};

// Report for the confinement check V(x) >= (1+delta) log(x^2+1).
// The inequality always fails in a central window for moderate potentials, so
// the pass criterion is tail domination: no violations on the outer decade of
// the probe grid, plus (for polynomial-type kinds) a positive even-degree
// leading term. gamma is the grid maximum of (-x V'(x)) / (1 + x^2), the
// smallest constant for which the one-sided growth bound holds on the grid.
struct GrowthReport {
    bool holds_everywhere = false;
    bool tail_holds = false;
    bool asymptotic_ok = false;
    double largest_violation_x = std::numeric_limits<double>::quiet_NaN();
    double gamma = 0.0;
    double delta = 0.0;
    double probe_range = 0.0;

    bool passes() const { return tail_holds && asymptotic_ok; }
};

inline GrowthReport check_growth(const Potential& v, double delta, double probe_range,
                                 std::size_t n_probe = 10001) {
    if (!(delta > 0.0)) throw invalid_argument("check_growth: delta must be > 0");
    if (!(probe_range > 0.0)) throw invalid_argument("check_growth: probe_range must be > 0");
    GrowthReport rep;
    rep.delta = delta;
    rep.probe_range = probe_range;

    const auto grid = linspace(-probe_range, probe_range, n_probe);
    bool any_violation = false;
    double largest = 0.0;
    double gamma = 0.0;
    for (double x : grid) {
        if (v.has_log_term() && x == 0.0) continue;
        const double rhs = (1.0 + delta) * std::log(x * x + 1.0);
        if (v.value(x) < rhs) {
            any_violation = true;
            largest = std::max(largest, std::abs(x));
        }
        gamma = std::max(gamma, (-x * v.deriv(x)) / (1.0 + x * x));
    }
    rep.holds_everywhere = !any_violation;
    rep.largest_violation_x = any_violation ? largest : std::numeric_limits<double>::quiet_NaN();
    rep.tail_holds = !any_violation || largest < 0.9 * probe_range;
    rep.gamma = gamma;

    switch (v.kind()) {
        case PotentialKind::quadratic: rep.asymptotic_ok = v.theta() > 0.0; break;
        case PotentialKind::quartic_double_well: rep.asymptotic_ok = true; break;
        case PotentialKind::abs_power: rep.asymptotic_ok = true; break;
        case PotentialKind::polynomial:
        case PotentialKind::poly_log: {
            const auto& c = v.coeffs();
            const std::size_t deg = c.size() - 1;
            rep.asymptotic_ok = deg >= 2 && deg % 2 == 0 && c.back() > 0.0;
            break;
        }
    }
    return rep;
}

// inf V'' over [lo, hi]; analytic for families whose V'' is quadratic or
// monotone in |x|, grid minimum otherwise.
inline double convexity_bound(const Potential& v, double lo, double hi) {
    if (!(lo <= hi)) throw invalid_argument("convexity_bound: empty interval");
    const bool contains0 = lo <= 0.0 && 0.0 <= hi;

    auto quadratic_min = [&](double a2, double a1, double a0) {
        // min of a2 x^2 + a1 x + a0 on [lo, hi]
        double m = std::min(a2 * lo * lo + a1 * lo + a0, a2 * hi * hi + a1 * hi + a0);
        if (a2 > 0.0) {
            const double xv = -a1 / (2.0 * a2);
            if (xv >= lo && xv <= hi) m = std::min(m, a2 * xv * xv + a1 * xv + a0);
        }
        return m;
    };

    switch (v.kind()) {
        case PotentialKind::quadratic: return 2.0 * v.theta();
        case PotentialKind::quartic_double_well: return quadratic_min(3.0, 0.0, v.double_well_c());
        case PotentialKind::abs_power: {
            const double p = v.power_exponent();
            const double lo_abs = contains0 ? 0.0 : std::min(std::abs(lo), std::abs(hi));
            const double hi_abs = std::max(std::abs(lo), std::abs(hi));
            if (p == 2.0) return 2.0 * v.power_scale();
            // V'' = a p (p-1) |x|^{p-2}, monotone in |x|
            const double at = p > 2.0 ? lo_abs : hi_abs;
            if (at == 0.0 && p < 2.0) throw domain_error("convexity_bound: abs_power singular at 0");
            return v.power_scale() * p * (p - 1.0) * std::pow(at, p - 2.0);
        }
        case PotentialKind::polynomial: {
            const auto& c = v.coeffs();
            if (c.size() <= 3) {
                // V'' constant
                return c.size() == 3 ? 2.0 * c[2] : 0.0;
            }
            if (c.size() == 4) {
                // V'' linear: min at an endpoint
                return std::min(v.deriv2(lo), v.deriv2(hi));
            }
            if (c.size() == 5) return quadratic_min(12.0 * c[4], 6.0 * c[3], 2.0 * c[2]);
            break;
        }
        case PotentialKind::poly_log: {
            if (contains0 && v.log_coeff() > 0.0) return -std::numeric_limits<double>::infinity();
            break;
        }
    }

    // grid minimum fallback
    double m = std::numeric_limits<double>::infinity();
    const std::size_t n = 20001;
    if (lo == hi) return v.has_log_term() && lo == 0.0 ? m : v.deriv2(lo);
    for (double x : linspace(lo, hi, n)) {
        if (v.has_log_term()) {
            if (x == 0.0) continue;
            if (contains0 && v.log_coeff() < 0.0 && std::abs(x) < 1e-8) continue;
        }
        m = std::min(m, v.deriv2(x));
    }
    return m;
}

} // namespace loggas
