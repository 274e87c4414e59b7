#pragma once

// Euler-Maruyama integrator for the interacting particle SDE
//   dx_i = sqrt(2/(beta N)) dW_i + [ (1/N) sum_{j != i} phi_R(x_i - x_j) - V'(x_i)/2 ] dt
// with the regularized repulsion kernel phi_R(x) = 1/x for |x| >= 1/R and R^2 x
// otherwise, collision/explosion monitoring, and observable bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/metric_series.hpp"
#include "loggas/parallel.hpp"
#include "loggas/potential.hpp"
#include "loggas/rng.hpp"
#include "loggas/test_functions.hpp"

namespace loggas {

struct ParticleState {
    std::vector<double> positions; // strictly increasing
    double time = 0.0;
    double beta = 2.0;

    std::size_t n() const { return positions.size(); }
};

inline void validate_state(const ParticleState& state) {
    if (state.positions.empty()) throw invalid_argument("ParticleState: empty configuration");
    if (!(state.beta > 0.0)) throw invalid_argument("ParticleState: beta must be positive");
    if (!(state.time >= 0.0)) throw invalid_argument("ParticleState: time must be >= 0");
    for (std::size_t i = 0; i < state.positions.size(); ++i) {
        if (!std::isfinite(state.positions[i])) throw invalid_argument("ParticleState: non-finite position");
        if (i > 0 && !(state.positions[i] > state.positions[i - 1]))
            throw invalid_argument("ParticleState: positions must be strictly increasing");
    }
}

struct SimConfig {
    double dt = 1e-3;
    std::uint64_t steps = 0;
    std::optional<double> regularization; // fixed R; empty selects the adaptive rule
    std::uint64_t seed = 0;
    unsigned thread_count = 1;
    bool zero_noise = false;

    void validate() const {
        if (!(dt > 0.0)) throw invalid_argument("SimConfig: dt must be positive");
        if (thread_count < 1) throw invalid_argument("SimConfig: thread_count must be >= 1");
        if (regularization) {
            if (!(*regularization > 0.0)) throw invalid_argument("SimConfig: regularization must be positive");
            if (dt * *regularization * *regularization > 1.0 + 1e-12)
                throw invalid_argument("SimConfig: fixed regularization requires dt*R^2 <= 1");
        }
    }
};

inline double phi_R(double x, double R) { return std::abs(x) >= 1.0 / R ? 1.0 / x : R * R * x; }

inline double min_gap(const ParticleState& state) {
    if (state.n() < 2) return std::numeric_limits<double>::infinity();
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < state.n(); ++i) g = std::min(g, state.positions[i] - state.positions[i - 1]);
    return g;
}

// Adaptive regularization: tight enough that the kernel is exact on every
// currently resolved gap (R >= 2/min_gap), at least 10, and capped so a single
// regularized kick dt * R^2 * gap stays below the inter-particle scale
// (R <= sqrt(N/(2 dt))), which keeps the scheme stable without truncating the
// physical repulsion of typical O(1/N) spacings.
inline double adaptive_regularization(const ParticleState& state, double dt) {
    const double gap = min_gap(state);
    const double want = std::isfinite(gap) && gap > 0.0 ? std::max(10.0, 2.0 / gap) : 10.0;
    const double cap = std::sqrt(static_cast<double>(state.n()) / (2.0 * dt));
    return std::min(want, std::max(10.0, cap));
}

// Per-particle drift (1/N) sum_{j != i} phi_R(x_i - x_j) - V'(x_i)/2.
// Each particle's interaction sum runs over ascending j, so the result is
// independent of the thread count.
inline std::vector<double> drift(const ParticleState& state, const Potential& v, double R,
                                 unsigned thread_count = 1) {
    if (!(R > 0.0)) throw invalid_argument("drift: R must be positive");
    const std::size_t n = state.n();
    const auto& x = state.positions;
    std::vector<double> out(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    parallel_for(n, thread_count, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            s += phi_R(x[i] - x[j], R);
        }
        out[i] = s * inv_n - 0.5 * v.deriv(x[i]);
    });
    return out;
}

// Lyapunov functional f = (1/N) sum V(x_i) - (1/N^2) sum_{i != j} log|x_i - x_j|.
inline double lyapunov(const ParticleState& state, const Potential& v) {
    const std::size_t n = state.n();
    const auto& x = state.positions;
    double pot = 0.0;
    for (const double xi : x) pot += v.value(xi);
    double logsum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::abs(x[j] - x[i]);
            if (d == 0.0) throw domain_error("lyapunov: coincident particles");
            logsum += std::log(d);
        }
    const double nn = static_cast<double>(n);
    return pot / nn - 2.0 * logsum / (nn * nn);
}

// One Euler-Maruyama step. Noise is drawn serially in particle order from the
// supplied stream, so trajectories are bit-identical for every thread count.
inline ParticleState step(const ParticleState& state, const Potential& v, const SimConfig& cfg, Rng& rng,
                          std::uint64_t step_index) {
    const std::size_t n = state.n();
    const double R = cfg.regularization ? *cfg.regularization : adaptive_regularization(state, cfg.dt);
    const auto d = drift(state, v, R, cfg.thread_count);

    ParticleState next = state;
    if (cfg.zero_noise) {
        for (std::size_t i = 0; i < n; ++i) next.positions[i] += d[i] * cfg.dt;
    } else {
        const double amp = std::sqrt(2.0 * cfg.dt / (state.beta * static_cast<double>(n)));
        for (std::size_t i = 0; i < n; ++i) next.positions[i] += d[i] * cfg.dt + amp * rng.normal();
    }
    for (const double xi : next.positions)
        if (!std::isfinite(xi)) throw explosion_error(step_index, "particle position became non-finite");

    std::sort(next.positions.begin(), next.positions.end());
    // exact ties (measure zero, but representable) are separated deterministically
    for (std::size_t i = 1; i < n; ++i)
        if (next.positions[i] <= next.positions[i - 1])
            next.positions[i] = std::nextafter(next.positions[i - 1], std::numeric_limits<double>::infinity());
    next.time = state.time + cfg.dt;
    return next;
}

// Owns the state, the noise stream, and the step counter of one trajectory.
class Simulator {
  public:
    Simulator(ParticleState initial, Potential v, SimConfig cfg)
        : state_(std::move(initial)), v_(std::move(v)), cfg_(cfg), rng_(derive_seed(cfg.seed, 0)) {
        cfg_.validate();
        validate_state(state_);
        if (state_.beta < 1.0)
            warnings_.push_back("beta < 1: outside the regime with a non-collision guarantee");
    }

    const ParticleState& state() const { return state_; }
    const SimConfig& config() const { return cfg_; }
    std::uint64_t step_index() const { return step_index_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    void advance(std::uint64_t n_steps) {
        for (std::uint64_t k = 0; k < n_steps; ++k) {
            check_stiffness();
            state_ = step(state_, v_, cfg_, rng_, step_index_ + 1);
            ++step_index_;
        }
    }

    // Advance and save the state every `save_every` steps (plus the initial state).
    std::vector<ParticleState> run_and_save(std::uint64_t n_steps, std::uint64_t save_every) {
        if (save_every == 0) throw invalid_argument("Simulator: save_every must be >= 1");
        std::vector<ParticleState> out;
        out.push_back(state_);
        for (std::uint64_t k = 0; k < n_steps; ++k) {
            advance(1);
            if ((k + 1) % save_every == 0 || k + 1 == n_steps) out.push_back(state_);
        }
        return out;
    }

  private:
    void check_stiffness() {
        if (stiffness_checked_) return;
        stiffness_checked_ = true;
        const double lo = state_.positions.front(), hi = state_.positions.back();
        double worst = 0.0;
        for (int k = 0; k <= 32; ++k) {
            const double x = lo + (hi - lo) * static_cast<double>(k) / 32.0;
            try {
                worst = std::max(worst, std::abs(v_.deriv2(x)));
            } catch (const domain_error&) {
                // kinds with a singular second derivative at the origin: skip the probe
            }
        }
        if (cfg_.dt * worst > 0.1)
            warnings_.push_back("dt*max|V''| exceeds 0.1 on the occupied range; the explicit scheme may be stiff");
    }

    ParticleState state_;
    Potential v_;
    SimConfig cfg_;
    Rng rng_;
    std::uint64_t step_index_ = 0;
    bool stiffness_checked_ = false;
    std::vector<std::string> warnings_;
};

// <L_N(t), f> along a saved trajectory.
inline MetricSeries observable_series(const std::vector<ParticleState>& trajectory, const TestFunction& f) {
    if (trajectory.empty()) throw invalid_argument("observable_series: empty trajectory");
    MetricSeries out("observable_" + f.id, {"value"});
    for (const auto& s : trajectory) out.add_row(s.time, {f.mean(s.positions)});
    return out;
}

} // namespace loggas
