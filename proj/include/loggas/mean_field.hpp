#pragma once

// Deterministic quantile-particle solver for the mean-field (noiseless) limit
// of the interacting eigenvalue dynamics.  Q ordered particles carry the
// midpoint quantiles of the measure; each follows the characteristic velocity
//   x_i' = (1/Q) sum_{j != i} 1/(x_i - x_j) - V'(x_i)/2,
// integrated with a classical four-stage Runge-Kutta step.  Repulsion is
// order-preserving for the exact flow, so any step that would swap or merge
// neighbours is rejected and retried at half the step size.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/free_energy.hpp"
#include "loggas/measures.hpp"
#include "loggas/metric_series.hpp"
#include "loggas/parallel.hpp"
#include "loggas/potential.hpp"
#include "loggas/test_functions.hpp"

namespace loggas {

struct MeanFieldState {
    std::vector<double> positions; // strictly increasing quantile particles
    double time = 0.0;
    Potential v = Potential::zero(); // confinement the state evolves under

    std::size_t q() const { return positions.size(); }
};

inline void validate_mean_field(const MeanFieldState& state) {
    if (state.positions.size() < 2)
        throw invalid_argument("mean-field state needs at least two quantile particles");
    for (std::size_t i = 0; i < state.positions.size(); ++i) {
        if (!std::isfinite(state.positions[i]))
            throw invalid_argument("mean-field state has a non-finite particle");
        if (i > 0 && !(state.positions[i - 1] < state.positions[i]))
            throw invalid_argument("mean-field particles must be strictly increasing");
    }
    if (!std::isfinite(state.time)) throw invalid_argument("mean-field state has a non-finite time");
}

namespace detail {

inline bool strictly_increasing_finite(const std::vector<double>& xs) {
    if (!std::isfinite(xs.front())) return false;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!std::isfinite(xs[i]) || !(xs[i - 1] < xs[i])) return false;
    return true;
}

inline double smallest_gap(const std::vector<double>& xs) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < xs.size(); ++i) g = std::min(g, xs[i] - xs[i - 1]);
    return g;
}

} // namespace detail

// Characteristic velocity of every particle; requires strictly increasing
// input.  Deterministic regardless of thread count: the inner sum runs in
// ascending j order for each i.
inline std::vector<double> mf_drift(const std::vector<double>& xs, const Potential& v, unsigned thread_count = 1) {
    const std::size_t q = xs.size();
    if (q < 2) throw invalid_argument("mf_drift: need at least two particles");
    if (!detail::strictly_increasing_finite(xs))
        throw invalid_argument("mf_drift: particles must be finite and strictly increasing");
    std::vector<double> out(q);
    const double inv_q = 1.0 / static_cast<double>(q);
    parallel_for(q, thread_count, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q; ++j) {
            if (j == i) continue;
            s += 1.0 / (xs[i] - xs[j]);
        }
        out[i] = s * inv_q - 0.5 * v.deriv(xs[i]);
    });
    return out;
}

namespace detail {

// One classical RK4 attempt.  Returns false (attempt rejected) if any stage
// point set or the final result loses strict ordering or finiteness.
inline bool rk4_attempt(const std::vector<double>& x0, const Potential& v, double dt, unsigned thread_count,
                        std::vector<double>& out) {
    const std::size_t q = x0.size();
    auto displaced = [&](const std::vector<double>& k, double h) {
        std::vector<double> y(q);
        for (std::size_t i = 0; i < q; ++i) y[i] = x0[i] + h * k[i];
        return y;
    };

    const std::vector<double> k1 = mf_drift(x0, v, thread_count);
    std::vector<double> y = displaced(k1, 0.5 * dt);
    if (!strictly_increasing_finite(y)) return false;
    const std::vector<double> k2 = mf_drift(y, v, thread_count);
    y = displaced(k2, 0.5 * dt);
    if (!strictly_increasing_finite(y)) return false;
    const std::vector<double> k3 = mf_drift(y, v, thread_count);
    y = displaced(k3, dt);
    if (!strictly_increasing_finite(y)) return false;
    const std::vector<double> k4 = mf_drift(y, v, thread_count);

    out.resize(q);
    for (std::size_t i = 0; i < q; ++i)
        out[i] = x0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return strictly_increasing_finite(out);
}

} // namespace detail

// Advance one step of at most dt.  A rejected attempt halves the step and
// retries from the original state, up to 20 halvings; the achieved step is
// reflected in the returned time, which may be smaller than requested.
inline MeanFieldState mf_step(const MeanFieldState& state, const Potential& v, double dt, unsigned thread_count = 1) {
    validate_mean_field(state);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw invalid_argument("mf_step: step size must be positive and finite");
    double h = dt;
    std::vector<double> next;
    for (int attempt = 0; attempt <= 20; ++attempt) {
        if (detail::rk4_attempt(state.positions, v, h, thread_count, next)) {
            MeanFieldState out;
            out.positions = std::move(next);
            out.time = state.time + h;
            out.v = v;
            return out;
        }
        h *= 0.5;
    }
    throw stiffness_error("mf_step: step rejected after 20 halvings; nearest-neighbour repulsion too stiff");
}

// Advance to an exact target time with the adaptive cap dt <= 0.1 * gap^2 * Q
// (keeps the nearest-neighbour expansion law g' ~ 2/(Q g) resolved), also
// honouring dt_max and landing exactly on t_target.
inline MeanFieldState mf_advance_to(MeanFieldState state, const Potential& v, double t_target, double dt_max,
                                    unsigned thread_count = 1) {
    validate_mean_field(state);
    if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw invalid_argument("mf_advance_to: dt_max must be positive");
    if (!std::isfinite(t_target) || t_target < state.time - 1e-12)
        throw invalid_argument("mf_advance_to: target time precedes the state time");
    const double tol = 1e-12 * std::max(1.0, std::abs(t_target));
    while (t_target - state.time > tol) {
        const double g = detail::smallest_gap(state.positions);
        double dt = std::min(dt_max, 0.1 * g * g * static_cast<double>(state.positions.size()));
        dt = std::min(dt, t_target - state.time);
        if (!(dt > 1e-15)) throw stiffness_error("mf_advance_to: adaptive step size underflowed");
        state = mf_step(state, v, dt, thread_count);
    }
    state.time = t_target;
    state.v = v;
    return state;
}

// Evenly spaced checkpoints from the initial state (inclusive) to t_final.
inline std::vector<MeanFieldState> mf_run(const MeanFieldState& initial, const Potential& v, double t_final,
                                          std::size_t n_slices, double dt_max, unsigned thread_count = 1) {
    validate_mean_field(initial);
    if (n_slices == 0) throw invalid_argument("mf_run: need at least one slice");
    if (!(t_final > initial.time)) throw invalid_argument("mf_run: final time must exceed the initial time");
    std::vector<MeanFieldState> out;
    out.reserve(n_slices + 1);
    MeanFieldState s = initial;
    s.v = v;
    out.push_back(s);
    const double t0 = initial.time;
    for (std::size_t k = 1; k <= n_slices; ++k) {
        const double tk =
            k == n_slices ? t_final
                          : t0 + (t_final - t0) * static_cast<double>(k) / static_cast<double>(n_slices);
        s = mf_advance_to(std::move(s), v, tk, dt_max, thread_count);
        out.push_back(s);
    }
    return out;
}

// Gap-based densification of the quantile particles, used only to report the
// integrated functionals along a run.
inline GridDensity densify_mean_field(const MeanFieldState& state, std::size_t m = 2048) {
    validate_mean_field(state);
    return densify_quantiles_gap(QuantileFunction(state.positions), m);
}

inline double mean_field_free_entropy(const MeanFieldState& state, const Potential& v, std::size_t m = 2048) {
    return free_entropy(densify_mean_field(state, m), v);
}

// Residual of the weak-form evolution identity
//   d/dt <f, mu_t> = 1/2 <<(f'(x)-f'(y))/(x-y), mu x mu>> - 1/2 <V' f', mu>
// evaluated on a uniformly spaced trajectory (spacing dt) with a centered
// time difference; the difference quotient takes its limit value f''(x) on
// the diagonal x = y.  One row per interior slice.
inline MetricSeries weak_form_residual(const std::vector<MeanFieldState>& trajectory, const Potential& v,
                                       const std::string& f_id, double dt) {
    if (trajectory.size() < 3) throw invalid_argument("weak_form_residual: need at least three slices");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw invalid_argument("weak_form_residual: slice spacing must be positive");
    const TestFunction f = TestFunction::parse(f_id);
    MetricSeries series("weak_form_residual", {"lhs", "rhs", "residual"});
    for (std::size_t k = 1; k + 1 < trajectory.size(); ++k) {
        const std::vector<double>& xs = trajectory[k].positions;
        const std::size_t q = xs.size();
        const double lhs = (f.mean(trajectory[k + 1].positions) - f.mean(trajectory[k - 1].positions)) / (2.0 * dt);
        std::vector<double> fp(q);
        for (std::size_t i = 0; i < q; ++i) fp[i] = f.deriv(xs[i]);
        double pair = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            pair += f.deriv2(xs[i]); // diagonal convention: limit of the quotient
            for (std::size_t j = 0; j < q; ++j) {
                if (j == i) continue;
                pair += (fp[i] - fp[j]) / (xs[i] - xs[j]);
            }
        }
        double pot = 0.0;
        for (std::size_t i = 0; i < q; ++i) pot += v.deriv(xs[i]) * fp[i];
        const double qd = static_cast<double>(q);
        const double rhs = 0.5 * pair / (qd * qd) - 0.5 * pot / qd;
        series.add_row(trajectory[k].time, {lhs, rhs, std::abs(lhs - rhs)});
    }
    return series;
}

// Exact W2 between two states carrying the same number of quantile particles:
// the quantile coupling is optimal in one dimension.
inline double mean_field_w2(const MeanFieldState& a, const MeanFieldState& b) {
    if (a.positions.size() != b.positions.size())
        throw invalid_argument("mean_field_w2: particle counts differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.positions.size(); ++i) {
        const double d = a.positions[i] - b.positions[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.positions.size()));
}

// Evolve two initial conditions side by side and compare W2(mu1_t, mu2_t)
// against the contraction bound exp(-K t) W2(mu1_0, mu2_0), with K the
// convexity bound of V over the joint initial support hull.  Columns: w2 and
// bound; the first row records the initial distance.
inline MetricSeries contraction_experiment(const MeanFieldState& mu1_0, const MeanFieldState& mu2_0,
                                           const Potential& v, double t_final,
                                           const std::vector<double>& checkpoints, double dt_max = 1e-2,
                                           unsigned thread_count = 1) {
    validate_mean_field(mu1_0);
    validate_mean_field(mu2_0);
    if (mu1_0.positions.size() != mu2_0.positions.size())
        throw invalid_argument("contraction_experiment: particle counts differ");
    if (mu1_0.time != mu2_0.time) throw invalid_argument("contraction_experiment: start times differ");
    if (checkpoints.empty()) throw invalid_argument("contraction_experiment: need at least one checkpoint");
    const double t0 = mu1_0.time;
    double prev = t0;
    for (const double c : checkpoints) {
        if (!(c > prev)) throw invalid_argument("contraction_experiment: checkpoints must be increasing and after t0");
        prev = c;
    }
    if (checkpoints.back() > t_final + 1e-12)
        throw invalid_argument("contraction_experiment: checkpoint beyond the final time");

    const double lo = std::min(mu1_0.positions.front(), mu2_0.positions.front());
    const double hi = std::max(mu1_0.positions.back(), mu2_0.positions.back());
    const double K = convexity_bound(v, lo, hi);
    const double w2_0 = mean_field_w2(mu1_0, mu2_0);

    MetricSeries series("contraction", {"w2", "bound"});
    series.add_row(t0, {w2_0, w2_0});
    MeanFieldState s1 = mu1_0, s2 = mu2_0;
    for (const double c : checkpoints) {
        s1 = mf_advance_to(std::move(s1), v, c, dt_max, thread_count);
        s2 = mf_advance_to(std::move(s2), v, c, dt_max, thread_count);
        const double bound = std::exp(-K * (c - t0)) * w2_0;
        series.add_row(c, {mean_field_w2(s1, s2), bound});
    }
    return series;
}

} // namespace loggas
