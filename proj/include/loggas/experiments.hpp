#pragma once

// Configuration-driven experiment runner: parses a JSON config, dispatches to
// the library modules, and emits a reproducible artifact directory holding
// one CSV per metric series, a summary JSON with PASS/FAIL per check, and a
// manifest JSON with content hashes.  `replay` re-runs the experiment from
// the config embedded in a manifest and verifies the regenerated CSVs are
// byte-identical to the originals.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "loggas/equilibrium.hpp"
#include "loggas/errors.hpp"
#include "loggas/free_energy.hpp"
#include "loggas/matrix_diffusion.hpp"
#include "loggas/mean_field.hpp"
#include "loggas/measures.hpp"
#include "loggas/metric_series.hpp"
#include "loggas/numeric.hpp"
#include "loggas/parallel.hpp"
#include "loggas/particle.hpp"
#include "loggas/potential.hpp"
#include "loggas/rng.hpp"
#include "loggas/test_functions.hpp"
#include "loggas/transforms.hpp"
#include "loggas/version.hpp"

namespace loggas {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// config access helpers (config_error carries the dotted field path)
// ---------------------------------------------------------------------------

namespace cfg {

inline const ordered_json* find(const ordered_json& j, const std::string& key) {
    if (!j.is_object()) return nullptr;
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline double require_number(const ordered_json& j, const std::string& key, const std::string& path) {
    const ordered_json* f = find(j, key);
    if (f == nullptr || !f->is_number()) throw config_error(path, "expected a number");
    return f->get<double>();
}

inline double number_or(const ordered_json& j, const std::string& key, const std::string& path, double fallback) {
    const ordered_json* f = find(j, key);
    if (f == nullptr) return fallback;
    if (!f->is_number()) throw config_error(path, "expected a number");
    return f->get<double>();
}

inline std::uint64_t require_seed(const ordered_json& j) {
    const ordered_json* f = find(j, "seed");
    if (f == nullptr || !f->is_number_integer() || (f->is_number_integer() && !f->is_number_unsigned() && f->get<std::int64_t>() < 0))
        throw config_error("seed", "stochastic experiments need a non-negative integer seed");
    return f->get<std::uint64_t>();
}

inline std::size_t size_or(const ordered_json& j, const std::string& key, const std::string& path,
                           std::size_t fallback) {
    const ordered_json* f = find(j, key);
    if (f == nullptr) return fallback;
    if (!f->is_number_integer() || f->get<std::int64_t>() <= 0)
        throw config_error(path, "expected a positive integer");
    return f->get<std::size_t>();
}

inline std::size_t require_size(const ordered_json& j, const std::string& key, const std::string& path) {
    const ordered_json* f = find(j, key);
    if (f == nullptr || !f->is_number_integer() || f->get<std::int64_t>() <= 0)
        throw config_error(path, "expected a positive integer");
    return f->get<std::size_t>();
}

inline std::string string_or(const ordered_json& j, const std::string& key, const std::string& path,
                             const std::string& fallback) {
    const ordered_json* f = find(j, key);
    if (f == nullptr) return fallback;
    if (!f->is_string()) throw config_error(path, "expected a string");
    return f->get<std::string>();
}

inline bool bool_or(const ordered_json& j, const std::string& key, const std::string& path, bool fallback) {
    const ordered_json* f = find(j, key);
    if (f == nullptr) return fallback;
    if (!f->is_boolean()) throw config_error(path, "expected a boolean");
    return f->get<bool>();
}

inline double positive(double value, const std::string& path) {
    if (!(value > 0.0) || !std::isfinite(value)) throw config_error(path, "must be positive");
    return value;
}

} // namespace cfg

// ---------------------------------------------------------------------------
// potential and initial-data specs
// ---------------------------------------------------------------------------

inline Potential parse_potential(const ordered_json& j, const std::string& path = "potential") {
    if (!j.is_object()) throw config_error(path, "expected an object with a 'kind'");
    const std::string kind = cfg::string_or(j, "kind", path + ".kind", "");
    if (kind == "quadratic") return Potential::quadratic(cfg::require_number(j, "theta", path + ".theta"));
    if (kind == "quartic_double_well")
        return Potential::quartic_double_well(cfg::require_number(j, "c", path + ".c"));
    if (kind == "polynomial" || kind == "poly_log") {
        const ordered_json* coeffs = cfg::find(j, "coeffs");
        if (coeffs == nullptr || !coeffs->is_array() || coeffs->empty())
            throw config_error(path + ".coeffs", "expected a non-empty array of numbers");
        std::vector<double> c;
        for (const auto& x : *coeffs) {
            if (!x.is_number()) throw config_error(path + ".coeffs", "expected a non-empty array of numbers");
            c.push_back(x.get<double>());
        }
        if (kind == "polynomial") return Potential::polynomial(std::move(c));
        return Potential::poly_log(std::move(c), cfg::require_number(j, "log_coeff", path + ".log_coeff"));
    }
    if (kind == "abs_power")
        return Potential::abs_power(cfg::require_number(j, "a", path + ".a"),
                                    cfg::require_number(j, "p", path + ".p"));
    if (kind == "kontsevich_penner")
        return Potential::kontsevich_penner(cfg::require_number(j, "a", path + ".a"),
                                            cfg::require_number(j, "b", path + ".b"),
                                            cfg::require_number(j, "c", path + ".c"));
    if (kind == "zero") return Potential::zero();
    throw config_error(path + ".kind", "unknown potential kind '" + kind + "'");
}

struct InitialSpec {
    std::string type = "equilibrium"; // equilibrium | semicircle | clustered
    double scale = 1.0;
    double shift = 0.0;
    double width = 0.5;  // clustered only
    double center = 0.0; // clustered only
};

inline InitialSpec parse_initial(const ordered_json* j, const std::string& path, InitialSpec fallback) {
    if (j == nullptr) return fallback;
    if (!j->is_object()) throw config_error(path, "expected an object");
    InitialSpec spec = fallback;
    spec.type = cfg::string_or(*j, "type", path + ".type", fallback.type);
    if (spec.type != "equilibrium" && spec.type != "semicircle" && spec.type != "clustered")
        throw config_error(path + ".type", "unknown initial type '" + spec.type + "'");
    spec.scale = cfg::number_or(*j, "scale", path + ".scale", fallback.scale);
    spec.shift = cfg::number_or(*j, "shift", path + ".shift", fallback.shift);
    spec.width = cfg::number_or(*j, "width", path + ".width", fallback.width);
    spec.center = cfg::number_or(*j, "center", path + ".center", fallback.center);
    return spec;
}

// Strictly increasing initial particle positions.
inline std::vector<double> build_initial(const InitialSpec& spec, const Potential& v, std::size_t count,
                                         const std::string& path = "initial") {
    if (count == 0) throw config_error(path, "particle count must be positive");
    try {
        if (spec.type == "clustered") {
            cfg::positive(spec.width, path + ".width");
            std::vector<double> xs(count);
            for (std::size_t i = 0; i < count; ++i)
                xs[i] = spec.center +
                        spec.width * ((static_cast<double>(i) + 0.5) / static_cast<double>(count) - 0.5);
            return xs;
        }
        cfg::positive(spec.scale, path + ".scale");
        const GridDensity base = spec.type == "equilibrium" ? equilibrium_density(v, 4096)
                                                            : equilibrium_density(Potential::quadratic(0.5), 4096);
        QuantileFunction qf = to_quantiles(base, count);
        for (double& x : qf.v) x = spec.scale * x + spec.shift;
        // guard against collisions after extreme down-scaling
        for (std::size_t i = 1; i < qf.v.size(); ++i)
            if (!(qf.v[i - 1] < qf.v[i])) qf.v[i] = std::nextafter(qf.v[i - 1], std::numeric_limits<double>::max());
        return qf.v;
    } catch (const config_error&) {
        throw;
    } catch (const error& e) {
        throw config_error(path, std::string("cannot build initial data: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// experiment results
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    ordered_json details; // small key/value block for the summary
};

struct ExperimentResult {
    std::string kind;
    std::vector<MetricSeries> series;
    std::vector<CheckResult> checks;
    std::string sidecar_name; // optional extra JSON file (empty: none)
    ordered_json sidecar;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    ordered_json summary() const {
        ordered_json s;
        s["kind"] = kind;
        s["pass"] = pass();
        ordered_json list = ordered_json::array();
        for (const auto& c : checks) {
            ordered_json jc;
            jc["name"] = c.name;
            jc["pass"] = c.pass;
            if (!c.details.is_null()) jc["details"] = c.details;
            list.push_back(std::move(jc));
        }
        s["checks"] = std::move(list);
        ordered_json files = ordered_json::array();
        for (const auto& ms : series) files.push_back(ms.name + ".csv");
        s["series"] = std::move(files);
        return s;
    }
};

inline std::vector<std::string> list_kinds() {
    return {"gdbm_run",    "matrix_crosscheck", "mean_field_decay", "contraction",
            "burgers",     "double_well_sweep", "equilibrium_audit"};
}

namespace detail {

inline std::string sanitize_token(double value) {
    std::string s = format_double(value);
    for (char& ch : s) {
        if (ch == '-') ch = 'm';
        if (ch == '.') ch = 'p';
    }
    return s;
}

inline double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double s = 0.0;
    for (const double x : xs) s += x;
    const double mean = s / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// checkpoint times -> exact step counts (each must be an integer multiple of dt)
inline std::vector<std::uint64_t> checkpoint_steps(const std::vector<double>& checkpoints, double dt) {
    std::vector<std::uint64_t> steps;
    double prev = 0.0;
    for (const double c : checkpoints) {
        if (!(c > prev)) throw config_error("checkpoints", "must be strictly increasing and positive");
        const auto k = static_cast<std::uint64_t>(std::llround(c / dt));
        if (k == 0 || std::abs(static_cast<double>(k) * dt - c) > 1e-9 * std::max(1.0, std::abs(c)))
            throw config_error("checkpoints", "each checkpoint must be an integer multiple of dt");
        steps.push_back(k);
        prev = c;
    }
    return steps;
}

inline std::vector<double> parse_checkpoints(const ordered_json& j, double t_final,
                                             std::vector<double> fallback) {
    const ordered_json* f = cfg::find(j, "checkpoints");
    std::vector<double> out;
    if (f == nullptr) {
        out = std::move(fallback);
    } else {
        if (!f->is_array() || f->empty()) throw config_error("checkpoints", "expected a non-empty array of times");
        for (const auto& x : *f) {
            if (!x.is_number()) throw config_error("checkpoints", "expected a non-empty array of times");
            out.push_back(x.get<double>());
        }
    }
    double prev = 0.0;
    for (const double c : out) {
        if (!(c > prev)) throw config_error("checkpoints", "must be strictly increasing and positive");
        prev = c;
    }
    if (!out.empty() && out.back() > t_final + 1e-12)
        throw config_error("checkpoints", "checkpoint beyond t_final");
    return out;
}

inline std::pair<double, double> spectral_moments_12(const std::vector<double>& xs) {
    double m1 = 0.0, m2 = 0.0;
    for (const double x : xs) {
        m1 += x;
        m2 += x * x;
    }
    const double n = static_cast<double>(xs.size());
    return {m1 / n, m2 / n};
}

} // namespace detail

// ---------------------------------------------------------------------------
// kind: gdbm_run
// ---------------------------------------------------------------------------

inline ExperimentResult run_gdbm(const ordered_json& config) {
    ExperimentResult result;
    result.kind = "gdbm_run";

    const Potential v = parse_potential(config.contains("potential") ? config["potential"] : ordered_json(nullptr));
    const double beta = cfg::positive(cfg::number_or(config, "beta", "beta", 2.0), "beta");
    const double dt = cfg::positive(cfg::require_number(config, "dt", "dt"), "dt");
    const double t_final = cfg::positive(cfg::require_number(config, "t_final", "t_final"), "t_final");
    const std::uint64_t seed = cfg::require_seed(config);
    const std::size_t trials = cfg::size_or(config, "trials", "trials", 1);
    const auto thread_count = static_cast<unsigned>(cfg::size_or(config, "thread_count", "thread_count", 1));
    const std::string check = cfg::string_or(config, "check", "check", "none");

    const std::vector<double> checkpoints = detail::parse_checkpoints(config, t_final, {t_final});
    const std::vector<std::uint64_t> steps = detail::checkpoint_steps(checkpoints, dt);

    if (check == "fluctuation_scaling") {
        const ordered_json* nv = cfg::find(config, "n_values");
        if (nv == nullptr || !nv->is_array() || nv->size() < 2)
            throw config_error("n_values", "fluctuation_scaling needs an array of at least two particle counts");
        std::vector<std::size_t> n_values;
        for (const auto& x : *nv) {
            if (!x.is_number_integer() || x.get<std::int64_t>() < 2)
                throw config_error("n_values", "particle counts must be integers >= 2");
            n_values.push_back(x.get<std::size_t>());
        }
        if (trials < 2) throw config_error("trials", "fluctuation_scaling needs at least two trials");
        const TestFunction f = TestFunction::parse(cfg::string_or(config, "test_function", "test_function", "cauchy"));
        const InitialSpec init = parse_initial(cfg::find(config, "initial"), "initial", InitialSpec{});

        MetricSeries series("fluctuation_scaling", {"n", "variance"});
        std::vector<double> log_n, log_var;
        for (std::size_t idx = 0; idx < n_values.size(); ++idx) {
            const std::size_t n = n_values[idx];
            const std::vector<double> start = build_initial(init, v, n);
            std::vector<double> values(trials);
            parallel_for(trials, thread_count, [&](std::size_t tr) {
                SimConfig sc;
                sc.dt = dt;
                sc.seed = derive_seed(derive_seed(seed, idx), tr);
                ParticleState ps;
                ps.positions = start;
                ps.beta = beta;
                Simulator sim(ps, v, sc);
                sim.advance(steps.back());
                values[tr] = f.mean(sim.state().positions);
            });
            const auto agg = detail::mean_se(values);
            double var = 0.0;
            for (const double x : values) var += (x - agg.mean) * (x - agg.mean);
            var /= static_cast<double>(trials - 1);
            series.add_row(t_final, {static_cast<double>(n), var});
            log_n.push_back(std::log(static_cast<double>(n)));
            log_var.push_back(std::log(var));
        }
        const double slope = detail::ls_slope(log_n, log_var);
        CheckResult c;
        c.name = "fluctuation_slope";
        c.pass = slope >= -2.3 && slope <= -1.7;
        c.details["slope"] = slope;
        c.details["expected"] = -2.0;
        c.details["tolerance"] = 0.3;
        result.checks.push_back(std::move(c));
        result.series.push_back(std::move(series));
        return result;
    }

    const std::size_t n = cfg::require_size(config, "n", "n");
    const InitialSpec default_init = check == "semicircle_w2"
                                         ? InitialSpec{"clustered", 1.0, 0.0, 0.5, 0.0}
                                         : InitialSpec{};
    const InitialSpec init = parse_initial(cfg::find(config, "initial"), "initial", default_init);
    const std::vector<double> start = build_initial(init, v, n);

    // per-trial observables at every checkpoint
    std::vector<std::vector<double>> m_half(trials), x_mean(trials);
    std::vector<std::vector<double>> finals(trials);
    const bool keep_finals = check == "semicircle_w2";
    parallel_for(trials, thread_count, [&](std::size_t tr) {
        SimConfig sc;
        sc.dt = dt;
        sc.seed = derive_seed(seed, tr);
        ParticleState ps;
        ps.positions = start;
        ps.beta = beta;
        Simulator sim(ps, v, sc);
        std::uint64_t done = 0;
        for (const std::uint64_t target : steps) {
            sim.advance(target - done);
            done = target;
            const auto& xs = sim.state().positions;
            double s1 = 0.0, s2 = 0.0;
            for (const double x : xs) {
                s1 += x;
                s2 += 0.5 * x * x;
            }
            x_mean[tr].push_back(s1 / static_cast<double>(n));
            m_half[tr].push_back(s2 / static_cast<double>(n));
        }
        if (keep_finals) finals[tr] = sim.state().positions;
    });

    if (check == "none") {
        MetricSeries series("observables", {"trial", "x_mean", "x2_half"});
        for (std::size_t k = 0; k < checkpoints.size(); ++k)
            for (std::size_t tr = 0; tr < trials; ++tr)
                series.add_row(checkpoints[k], {static_cast<double>(tr), x_mean[tr][k], m_half[tr][k]});
        result.series.push_back(std::move(series));
        CheckResult c;
        c.name = "completed";
        c.pass = true;
        result.checks.push_back(std::move(c));
        return result;
    }

    if (check == "moment_identity") {
        if (v.kind() != PotentialKind::quadratic)
            throw config_error("potential.kind", "moment_identity needs a quadratic confinement");
        const double theta = v.theta();
        cfg::positive(theta, "potential.theta");
        if (trials < 2) throw config_error("trials", "moment_identity needs at least two trials");
        double m0 = 0.0;
        for (const double x : start) m0 += 0.5 * x * x;
        m0 /= static_cast<double>(n);
        const double nn = static_cast<double>(n);
        const double asym = (1.0 / (beta * nn) + (nn - 1.0) / (2.0 * nn)) / (2.0 * theta);

        MetricSeries series("moment_identity", {"observed_mean", "predicted", "mc_se", "z"});
        bool pass = true;
        double worst_z = 0.0;
        for (std::size_t k = 0; k < checkpoints.size(); ++k) {
            std::vector<double> vals(trials);
            for (std::size_t tr = 0; tr < trials; ++tr) vals[tr] = m_half[tr][k];
            const auto agg = detail::mean_se(vals);
            const double pred = asym + (m0 - asym) * std::exp(-2.0 * theta * checkpoints[k]);
            const double z = agg.se > 0.0 ? (agg.mean - pred) / agg.se : 0.0;
            worst_z = std::max(worst_z, std::abs(z));
            if (std::abs(z) > 3.0) pass = false;
            series.add_row(checkpoints[k], {agg.mean, pred, agg.se, z});
        }
        CheckResult c;
        c.name = "moment_identity";
        c.pass = pass;
        c.details["worst_abs_z"] = worst_z;
        c.details["bound"] = 3.0;
        result.checks.push_back(std::move(c));
        result.series.push_back(std::move(series));
        return result;
    }

    if (check == "semicircle_w2") {
        const double tol = cfg::positive(cfg::number_or(config, "w2_tol", "w2_tol", 0.05), "w2_tol");
        const std::size_t m = cfg::size_or(config, "m", "m", 4096);
        std::optional<double> bandwidth;
        if (cfg::find(config, "bandwidth") != nullptr)
            bandwidth = cfg::positive(cfg::require_number(config, "bandwidth", "bandwidth"), "bandwidth");
        GridDensity eq = [&] {
            try {
                return equilibrium_density(v, m);
            } catch (const error& e) {
                throw config_error("potential.kind", std::string("no closed-form equilibrium: ") + e.what());
            }
        }();
        MetricSeries series("semicircle_w2", {"trial", "w2"});
        double worst = 0.0;
        for (std::size_t tr = 0; tr < trials; ++tr) {
            const GridDensity kde = density_from_particles(finals[tr], m, bandwidth);
            const double w2 = wasserstein(2.0, kde, eq, 2048);
            worst = std::max(worst, w2);
            series.add_row(t_final, {static_cast<double>(tr), w2});
        }
        CheckResult c;
        c.name = "semicircle_w2";
        c.pass = worst <= tol;
        c.details["worst_w2"] = worst;
        c.details["bound"] = tol;
        result.checks.push_back(std::move(c));
        result.series.push_back(std::move(series));
        return result;
    }

    throw config_error("check", "unknown check '" + check + "'");
}

// ---------------------------------------------------------------------------
// kind: matrix_crosscheck
// ---------------------------------------------------------------------------

inline ExperimentResult run_matrix_crosscheck(const ordered_json& config) {
    ExperimentResult result;
    result.kind = "matrix_crosscheck";

    const Potential v = parse_potential(config.contains("potential") ? config["potential"] : ordered_json(nullptr));
    const double beta = cfg::number_or(config, "beta", "beta", 2.0);
    if (beta != 1.0 && beta != 2.0) throw config_error("beta", "matrix ensembles are implemented for beta in {1, 2}");
    const std::size_t n = cfg::require_size(config, "n", "n");
    const double dt = cfg::positive(cfg::require_number(config, "dt", "dt"), "dt");
    const double t_final = cfg::positive(cfg::require_number(config, "t_final", "t_final"), "t_final");
    const std::uint64_t seed = cfg::require_seed(config);
    const std::size_t trials = cfg::size_or(config, "trials", "trials", 200);
    if (trials < 2) throw config_error("trials", "needs at least two trials");
    const auto thread_count = static_cast<unsigned>(cfg::size_or(config, "thread_count", "thread_count", 1));
    const std::vector<std::uint64_t> steps = detail::checkpoint_steps({t_final}, dt);
    const std::uint64_t n_steps = steps.back();

    const InitialSpec init =
        parse_initial(cfg::find(config, "initial"), "initial", InitialSpec{"semicircle", 0.5, 0.0, 0.5, 0.0});
    const std::vector<double> start = build_initial(init, v, n);

    constexpr int kMoments = 4;
    std::vector<std::array<double, kMoments>> matrix_m(trials), particle_m(trials);
    parallel_for(trials, thread_count, [&](std::size_t tr) {
        auto moments = [&](const std::vector<double>& xs) {
            std::array<double, kMoments> out{};
            for (const double x : xs) {
                double p = 1.0;
                for (int k = 0; k < kMoments; ++k) {
                    p *= x;
                    out[static_cast<std::size_t>(k)] += p;
                }
            }
            for (auto& m : out) m /= static_cast<double>(xs.size());
            return out;
        };

        Rng mrng(derive_seed(seed, 2 * tr));
        if (beta == 2.0) {
            auto s = HermitianState::diagonal(start);
            for (std::uint64_t k = 0; k < n_steps; ++k) s = matrix_step(s, v, dt, mrng);
            matrix_m[tr] = moments(spectrum(s));
        } else {
            auto s = SymmetricState::diagonal(start);
            for (std::uint64_t k = 0; k < n_steps; ++k) s = matrix_step(s, v, dt, mrng);
            matrix_m[tr] = moments(spectrum(s));
        }

        SimConfig sc;
        sc.dt = dt;
        sc.seed = derive_seed(seed, 2 * tr + 1);
        ParticleState ps;
        ps.positions = start;
        ps.beta = beta;
        Simulator sim(ps, v, sc);
        sim.advance(n_steps);
        particle_m[tr] = moments(sim.state().positions);
    });

    MetricSeries series("matrix_crosscheck", {"moment", "matrix_mean", "matrix_se", "particle_mean", "particle_se", "z"});
    bool pass = true;
    double worst_z = 0.0;
    for (int k = 0; k < kMoments; ++k) {
        std::vector<double> ma(trials), pa(trials);
        for (std::size_t tr = 0; tr < trials; ++tr) {
            ma[tr] = matrix_m[tr][static_cast<std::size_t>(k)];
            pa[tr] = particle_m[tr][static_cast<std::size_t>(k)];
        }
        const auto am = detail::mean_se(ma);
        const auto ap = detail::mean_se(pa);
        const double combined = std::sqrt(am.se * am.se + ap.se * ap.se);
        const double z = combined > 0.0 ? (am.mean - ap.mean) / combined : 0.0;
        worst_z = std::max(worst_z, std::abs(z));
        if (std::abs(z) > 3.0) pass = false;
        series.add_row(t_final, {static_cast<double>(k + 1), am.mean, am.se, ap.mean, ap.se, z});
    }
    CheckResult c;
    c.name = "moment_agreement";
    c.pass = pass;
    c.details["worst_abs_z"] = worst_z;
    c.details["bound"] = 3.0;
    result.checks.push_back(std::move(c));
    result.series.push_back(std::move(series));
    return result;
}

// ---------------------------------------------------------------------------
// kind: mean_field_decay (modes: decay | stationarity)
// ---------------------------------------------------------------------------

inline ExperimentResult run_mean_field_decay(const ordered_json& config) {
    ExperimentResult result;
    result.kind = "mean_field_decay";

    const Potential v = parse_potential(config.contains("potential") ? config["potential"] : ordered_json(nullptr));
    const std::size_t q = cfg::size_or(config, "q", "q", 1024);
    if (q < 2) throw config_error("q", "need at least two quantile particles");
    const std::string mode = cfg::string_or(config, "mode", "mode", "decay");
    if (mode != "decay" && mode != "stationarity") throw config_error("mode", "expected 'decay' or 'stationarity'");
    const double dt_max = cfg::positive(cfg::number_or(config, "dt_max", "dt_max", 1e-2), "dt_max");
    const auto thread_count = static_cast<unsigned>(cfg::size_or(config, "thread_count", "thread_count", 1));
    const double t_final_default = 2.0;
    const double t_final = cfg::positive(cfg::number_or(config, "t_final", "t_final", t_final_default), "t_final");
    const std::vector<double> checkpoints = detail::parse_checkpoints(config, t_final, {0.5, 1.0, 2.0});

    const GridDensity eq = [&] {
        try {
            return equilibrium_density(v, 4096);
        } catch (const error& e) {
            throw config_error("potential.kind", std::string("no closed-form equilibrium: ") + e.what());
        }
    }();
    MeanFieldState eq_state;
    eq_state.positions = to_quantiles(eq, q).v;
    eq_state.v = v;

    const InitialSpec fallback = mode == "decay" ? InitialSpec{"semicircle", 0.2, 0.0, 0.5, 0.0}
                                                 : InitialSpec{"equilibrium", 1.0, 0.0, 0.5, 0.0};
    const InitialSpec init = parse_initial(cfg::find(config, "initial"), "initial", fallback);
    MeanFieldState s0;
    s0.positions = build_initial(init, v, q);
    s0.v = v;
    validate_mean_field(s0);

    if (mode == "stationarity") {
        const double tol = cfg::positive(cfg::number_or(config, "w2_tol", "w2_tol", 1e-3), "w2_tol");
        MetricSeries series("stationarity", {"w2_drift"});
        MeanFieldState s = s0;
        bool pass = true;
        double worst = 0.0;
        for (const double t : checkpoints) {
            s = mf_advance_to(std::move(s), v, t, dt_max, thread_count);
            const double drift = mean_field_w2(s, s0);
            worst = std::max(worst, drift);
            if (drift > tol) pass = false;
            series.add_row(t, {drift});
        }
        CheckResult c;
        c.name = "w2_stationarity";
        c.pass = pass;
        c.details["worst_w2_drift"] = worst;
        c.details["bound"] = tol;
        result.checks.push_back(std::move(c));
        result.series.push_back(std::move(series));
        return result;
    }

    const double slack = 1.05;
    const double K = convexity_bound(v, std::min(s0.positions.front(), eq.a), std::max(s0.positions.back(), eq.b));
    const double sigma_eq = free_entropy(eq, v);
    const std::size_t m = cfg::size_or(config, "m", "m", 2048);
    const double w2_0 = mean_field_w2(s0, eq_state);
    const double sig_0 = mean_field_free_entropy(s0, v, m) - sigma_eq;

    MetricSeries series("decay", {"w2", "w2_bound", "sigma_rel", "sigma_bound"});
    series.add_row(0.0, {w2_0, w2_0, sig_0, sig_0});
    MeanFieldState s = s0;
    bool w2_pass = true, sig_pass = true;
    for (const double t : checkpoints) {
        s = mf_advance_to(std::move(s), v, t, dt_max, thread_count);
        const double w2 = mean_field_w2(s, eq_state);
        const double sig = mean_field_free_entropy(s, v, m) - sigma_eq;
        const double w2_bound = std::exp(-K * t) * w2_0;
        const double sig_bound = std::exp(-2.0 * K * t) * sig_0;
        if (w2 > slack * w2_bound) w2_pass = false;
        if (sig > slack * sig_bound) sig_pass = false;
        series.add_row(t, {w2, w2_bound, sig, sig_bound});
    }
    CheckResult cw;
    cw.name = "w2_decay";
    cw.pass = w2_pass;
    cw.details["rate"] = K;
    cw.details["slack"] = slack;
    result.checks.push_back(std::move(cw));
    CheckResult cs;
    cs.name = "free_entropy_decay";
    cs.pass = sig_pass;
    cs.details["rate"] = 2.0 * K;
    cs.details["slack"] = slack;
    result.checks.push_back(std::move(cs));
    result.series.push_back(std::move(series));
    return result;
}

// ---------------------------------------------------------------------------
// kind: contraction
// ---------------------------------------------------------------------------

inline ExperimentResult run_contraction(const ordered_json& config) {
    ExperimentResult result;
    result.kind = "contraction";

    const Potential v = parse_potential(config.contains("potential") ? config["potential"] : ordered_json(nullptr));
    const std::size_t q = cfg::size_or(config, "q", "q", 512);
    const double dt_max = cfg::positive(cfg::number_or(config, "dt_max", "dt_max", 5e-3), "dt_max");
    const auto thread_count = static_cast<unsigned>(cfg::size_or(config, "thread_count", "thread_count", 1));
    const double t_final = cfg::positive(cfg::number_or(config, "t_final", "t_final", 2.0), "t_final");
    const std::vector<double> checkpoints = detail::parse_checkpoints(config, t_final, {0.5, 1.0, 2.0});
    const double slack = cfg::positive(cfg::number_or(config, "slack", "slack", 0.05), "slack");

    const InitialSpec i1 =
        parse_initial(cfg::find(config, "initial"), "initial", InitialSpec{"semicircle", 0.4, 0.0, 0.5, 0.0});
    const InitialSpec i2 =
        parse_initial(cfg::find(config, "initial2"), "initial2", InitialSpec{"semicircle", 0.7, 0.0, 0.5, 0.0});
    MeanFieldState s1, s2;
    s1.positions = build_initial(i1, v, q, "initial");
    s2.positions = build_initial(i2, v, q, "initial2");
    s1.v = s2.v = v;

    MetricSeries series = contraction_experiment(s1, s2, v, t_final, checkpoints, dt_max, thread_count);
    bool pass = true;
    double worst_ratio = 0.0;
    for (std::size_t k = 1; k < series.rows.size(); ++k) {
        const double w2 = series.rows[k][0];
        const double bound = series.rows[k][1];
        if (bound > 0.0) worst_ratio = std::max(worst_ratio, w2 / bound);
        if (w2 > (1.0 + slack) * bound) pass = false;
    }
    CheckResult c;
    c.name = "w2_contraction";
    c.pass = pass;
    c.details["worst_ratio"] = worst_ratio;
    c.details["allowed_ratio"] = 1.0 + slack;
    result.checks.push_back(std::move(c));
    result.series.push_back(std::move(series));
    return result;
}

// ---------------------------------------------------------------------------
// kind: burgers
// ---------------------------------------------------------------------------

namespace detail {

// Long-form residual table of the complex Burgers identity for the Stieltjes
// transform of the quantile-particle trajectory (uniform slice spacing dt).
inline MetricSeries particle_burgers_series(const std::vector<MeanFieldState>& slices, double theta,
                                            const std::vector<std::complex<double>>& zs, double dt,
                                            double dz = 0.02) {
    MetricSeries series("burgers_residual", {"z_re", "z_im", "residual"});
    for (std::size_t k = 1; k + 1 < slices.size(); ++k) {
        for (const auto& z : zs) {
            const std::complex<double> g = stieltjes(slices[k].positions, z);
            const std::complex<double> gp = stieltjes(slices[k].positions, z + dz);
            const std::complex<double> gm = stieltjes(slices[k].positions, z - dz);
            const std::complex<double> gt =
                (stieltjes(slices[k + 1].positions, z) - stieltjes(slices[k - 1].positions, z)) / (2.0 * dt);
            const std::complex<double> gz = (gp - gm) / (2.0 * dz);
            const std::complex<double> resid = gt - (-g + theta * z) * gz - theta * g;
            series.add_row(slices[k].time, {z.real(), z.imag(), std::abs(resid)});
        }
    }
    return series;
}

} // namespace detail

inline ExperimentResult run_burgers(const ordered_json& config) {
    ExperimentResult result;
    result.kind = "burgers";

    const Potential v = parse_potential(config.contains("potential") ? config["potential"] : ordered_json(nullptr));
    if (v.kind() != PotentialKind::quadratic)
        throw config_error("potential.kind", "the Burgers identity needs a quadratic confinement");
    const double theta = v.theta();
    const std::size_t q = cfg::size_or(config, "q", "q", 1024);
    const double dt = cfg::positive(cfg::number_or(config, "dt", "dt", 1e-3), "dt");
    const double t_final = cfg::positive(cfg::number_or(config, "t_final", "t_final", 0.1), "t_final");
    const double dt_max = cfg::positive(cfg::number_or(config, "dt_max", "dt_max", 1e-3), "dt_max");
    const auto thread_count = static_cast<unsigned>(cfg::size_or(config, "thread_count", "thread_count", 1));
    const double tol = cfg::positive(cfg::number_or(config, "residual_tol", "residual_tol", 1e-3), "residual_tol");
    const bool refine = cfg::bool_or(config, "refine", "refine", false);
    const double dz = cfg::positive(cfg::number_or(config, "dz", "dz", 0.02), "dz");

    std::vector<std::complex<double>> zs;
    const ordered_json* zj = cfg::find(config, "zs");
    if (zj == nullptr) {
        zs.emplace_back(0.0, 2.0);
    } else {
        if (!zj->is_array() || zj->empty()) throw config_error("zs", "expected an array of [re, im] pairs");
        for (const auto& pair : *zj) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
                throw config_error("zs", "expected an array of [re, im] pairs");
            const std::complex<double> z(pair[0].get<double>(), pair[1].get<double>());
            if (z.imag() == 0.0) throw config_error("zs", "probe points must be off the real axis");
            zs.push_back(z);
        }
    }

    const auto n_slices = static_cast<std::size_t>(std::llround(t_final / dt));
    if (n_slices < 2 || std::abs(static_cast<double>(n_slices) * dt - t_final) > 1e-9)
        throw config_error("t_final", "must be an integer multiple of dt with at least two slices");

    const InitialSpec init =
        parse_initial(cfg::find(config, "initial"), "initial", InitialSpec{"semicircle", 0.6, 0.0, 0.5, 0.0});

    auto run_once = [&](std::size_t qq, double slice_dt, std::size_t slices) {
        MeanFieldState s;
        s.positions = build_initial(init, v, qq);
        s.v = v;
        const auto traj = mf_run(s, v, slice_dt * static_cast<double>(slices), slices, dt_max, thread_count);
        return detail::particle_burgers_series(traj, theta, zs, slice_dt, dz);
    };
    auto max_residual = [](const MetricSeries& s) {
        double worst = 0.0;
        for (const auto& row : s.rows) worst = std::max(worst, row[2]);
        return worst;
    };

    MetricSeries series = run_once(q, dt, n_slices);
    const double worst = max_residual(series);
    CheckResult c;
    c.name = "burgers_residual";
    c.pass = worst <= tol;
    c.details["worst_residual"] = worst;
    c.details["bound"] = tol;
    result.checks.push_back(std::move(c));
    result.series.push_back(std::move(series));

    if (refine) {
        if (q % 2 != 0 || n_slices % 2 != 0)
            throw config_error("refine", "refinement needs even q and an even slice count");
        MetricSeries coarse = run_once(q / 2, 2.0 * dt, n_slices / 2);
        coarse.name = "burgers_residual_coarse";
        const double worst_coarse = max_residual(coarse);
        CheckResult r;
        r.name = "burgers_refinement";
        r.pass = worst <= 0.75 * worst_coarse;
        r.details["fine"] = worst;
        r.details["coarse"] = worst_coarse;
        r.details["required_ratio"] = 0.75;
        result.checks.push_back(std::move(r));
        result.series.push_back(std::move(coarse));
    }
    return result;
}

// ---------------------------------------------------------------------------
// kind: double_well_sweep
// ---------------------------------------------------------------------------

inline ExperimentResult run_double_well_sweep(const ordered_json& config) {
    ExperimentResult result;
    result.kind = "double_well_sweep";

    const std::size_t q = cfg::size_or(config, "q", "q", 512);
    const double t_final = cfg::positive(cfg::number_or(config, "t_final", "t_final", 1.5), "t_final");
    const std::size_t n_slices = cfg::size_or(config, "slices", "slices", 6);
    const double dt_max = cfg::positive(cfg::number_or(config, "dt_max", "dt_max", 4e-3), "dt_max");
    const std::size_t m = cfg::size_or(config, "m", "m", 2048);
    const double sigma_slack = cfg::positive(cfg::number_or(config, "sigma_slack", "sigma_slack", 5e-4), "sigma_slack");
    const auto thread_count = static_cast<unsigned>(cfg::size_or(config, "thread_count", "thread_count", 1));

    struct Case {
        double c;
        InitialSpec init;
    };
    std::vector<Case> cases;
    const ordered_json* cj = cfg::find(config, "cases");
    if (cj == nullptr) {
        for (const double c : {-2.0, -1.5, -1.0, -0.5})
            cases.push_back({c, InitialSpec{"semicircle", 0.4, 0.0, 0.5, 0.0}});
    } else {
        if (!cj->is_array() || cj->empty()) throw config_error("cases", "expected a non-empty array");
        for (std::size_t i = 0; i < cj->size(); ++i) {
            const auto& item = (*cj)[i];
            const std::string path = "cases[" + std::to_string(i) + "]";
            if (!item.is_object()) throw config_error(path, "expected an object");
            Case cs;
            cs.c = cfg::require_number(item, "c", path + ".c");
            cs.init = parse_initial(cfg::find(item, "initial"), path + ".initial",
                                    InitialSpec{"semicircle", 0.4, 0.0, 0.5, 0.0});
            cases.push_back(std::move(cs));
        }
    }

    for (const auto& cs : cases) {
        const Potential v = Potential::quartic_double_well(cs.c);
        const std::string token = detail::sanitize_token(cs.c);
        MeanFieldState eq_state;
        eq_state.positions = to_quantiles(equilibrium_density(v, 4096), q).v;

        MeanFieldState s0;
        s0.positions = build_initial(cs.init, v, q, "cases.initial");
        s0.v = v;
        const auto slices = mf_run(s0, v, t_final, n_slices, dt_max, thread_count);

        MetricSeries series("double_well_c_" + token, {"sigma_v", "w2"});
        std::vector<double> sigma;
        for (const auto& s : slices) {
            sigma.push_back(mean_field_free_entropy(s, v, m));
            series.add_row(s.time, {sigma.back(), mean_field_w2(s, eq_state)});
        }
        bool monotone = true;
        double worst_uptick = 0.0;
        for (std::size_t k = 1; k < sigma.size(); ++k) {
            worst_uptick = std::max(worst_uptick, sigma[k] - sigma[k - 1]);
            if (sigma[k] > sigma[k - 1] + sigma_slack) monotone = false;
        }
        CheckResult c;
        c.name = "sigma_monotone_c_" + token;
        c.pass = monotone;
        c.details["worst_uptick"] = worst_uptick;
        c.details["slack"] = sigma_slack;
        result.checks.push_back(std::move(c));
        result.series.push_back(std::move(series));
    }
    return result;
}

// ---------------------------------------------------------------------------
// kind: equilibrium_audit
// ---------------------------------------------------------------------------

inline ExperimentResult run_equilibrium_audit(const ordered_json& config) {
    ExperimentResult result;
    result.kind = "equilibrium_audit";

    const std::size_t m = cfg::size_or(config, "m", "m", 4096);
    std::vector<double> c_values;
    const ordered_json* cj = cfg::find(config, "c_values");
    if (cj == nullptr) {
        c_values = {-3.0, -2.0, 0.0, 1.0};
    } else {
        if (!cj->is_array()) throw config_error("c_values", "expected an array of numbers");
        for (const auto& x : *cj) {
            if (!x.is_number()) throw config_error("c_values", "expected an array of numbers");
            c_values.push_back(x.get<double>());
        }
    }
    const bool include_semicircle = cfg::bool_or(config, "include_semicircle", "include_semicircle", true);
    const double theta = cfg::positive(cfg::number_or(config, "theta", "theta", 0.5), "theta");

    struct Case {
        std::string name;
        Potential v;
    };
    std::vector<Case> cases;
    if (include_semicircle) cases.push_back({"semicircle", Potential::quadratic(theta)});
    for (const double c : c_values)
        cases.push_back({"dw_" + detail::sanitize_token(c), Potential::quartic_double_well(c)});

    MetricSeries series("equilibrium_audit", {"case_index", "mass_error", "el_residual", "el_residual_refined", "ratio"});
    ordered_json params = ordered_json::array();
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& cs = cases[i];
        const GridDensity mu = equilibrium_density(cs.v, m);
        const double mass_error = std::abs(mu.mass() - 1.0);
        const double el = euler_lagrange_residual(mu, cs.v);
        const GridDensity mu2 = equilibrium_density(cs.v, 2 * m);
        const double el2 = euler_lagrange_residual(mu2, cs.v);
        const double ratio = el > 0.0 ? el2 / el : 0.0;
        series.add_row(static_cast<double>(i), {static_cast<double>(i), mass_error, el, el2, ratio});

        const EquilibriumSpec spec = equilibrium_spec(cs.v);
        ordered_json p;
        p["name"] = cs.name;
        p["family"] = spec.family == EquilibriumFamily::semicircle
                          ? "semicircle"
                          : (spec.family == EquilibriumFamily::one_cut_quartic ? "one_cut_quartic" : "two_cut_quartic");
        ordered_json intervals = ordered_json::array();
        for (const auto& iv : spec.intervals) intervals.push_back({iv[0], iv[1]});
        p["intervals"] = std::move(intervals);
        if (spec.family == EquilibriumFamily::semicircle) {
            p["sigma"] = spec.sigma;
        } else {
            p["a2"] = spec.a2;
            if (spec.family == EquilibriumFamily::two_cut_quartic) p["b2"] = spec.b2;
            if (spec.family == EquilibriumFamily::one_cut_quartic) p["b0"] = spec.b0;
        }
        params.push_back(std::move(p));

        CheckResult cm;
        cm.name = "mass_" + cs.name;
        cm.pass = mass_error <= 1e-8;
        cm.details["mass_error"] = mass_error;
        cm.details["bound"] = 1e-8;
        result.checks.push_back(std::move(cm));
        CheckResult ce;
        ce.name = "el_residual_" + cs.name;
        ce.pass = el <= 5e-3;
        ce.details["residual"] = el;
        ce.details["bound"] = 5e-3;
        result.checks.push_back(std::move(ce));
        CheckResult cr;
        cr.name = "el_refinement_" + cs.name;
        cr.pass = ratio <= 0.75;
        cr.details["ratio"] = ratio;
        cr.details["bound"] = 0.75;
        result.checks.push_back(std::move(cr));
    }
    result.series.push_back(std::move(series));
    result.sidecar_name = "equilibrium_params.json";
    result.sidecar = std::move(params);
    return result;
}

// ---------------------------------------------------------------------------
// dispatch, output writing, replay
// ---------------------------------------------------------------------------

inline ExperimentResult run_experiment(const ordered_json& config) {
    if (!config.is_object()) throw config_error("", "config must be a JSON object");
    const std::string kind = cfg::string_or(config, "kind", "kind", "");
    if (kind == "gdbm_run") return run_gdbm(config);
    if (kind == "matrix_crosscheck") return run_matrix_crosscheck(config);
    if (kind == "mean_field_decay") return run_mean_field_decay(config);
    if (kind == "contraction") return run_contraction(config);
    if (kind == "burgers") return run_burgers(config);
    if (kind == "double_well_sweep") return run_double_well_sweep(config);
    if (kind == "equilibrium_audit") return run_equilibrium_audit(config);
    throw config_error("kind", "unknown experiment kind '" + kind + "'");
}

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw error("sha256: digest failure");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

inline std::string series_csv(const MetricSeries& s) {
    std::ostringstream os;
    s.write_csv(os);
    return os.str();
}

// Regenerate the artifact file set in memory: name -> bytes.
inline std::vector<std::pair<std::string, std::string>> artifact_files(const ExperimentResult& result) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& s : result.series) files.emplace_back(s.name + ".csv", series_csv(s));
    files.emplace_back("summary.json", result.summary().dump(2) + "\n");
    if (!result.sidecar_name.empty()) files.emplace_back(result.sidecar_name, result.sidecar.dump(2) + "\n");
    return files;
}

struct RunOutcome {
    bool pass = false;
    std::filesystem::path outdir;
    std::vector<std::string> failed_checks;
};

// Run the experiment and write CSVs, summary.json, and manifest.json.
inline RunOutcome run_and_write(const ordered_json& config, const std::optional<std::string>& output_override) {
    const ExperimentResult result = run_experiment(config);
    std::string outdir_name;
    if (output_override) {
        outdir_name = *output_override;
    } else {
        outdir_name = cfg::string_or(config, "output", "output", "runs/" + result.kind);
    }
    const std::filesystem::path outdir(outdir_name);
    std::filesystem::create_directories(outdir);

    const auto files = artifact_files(result);
    ordered_json manifest;
    manifest["library_version"] = library_version;
    manifest["kind"] = result.kind;
    manifest["config"] = config;
    ordered_json file_hashes;
    std::string combined;
    for (const auto& [name, bytes] : files) {
        std::ofstream out(outdir / name, std::ios::binary);
        if (!out) throw error("cannot write " + (outdir / name).string());
        out << bytes;
        const std::string h = sha256_hex(bytes);
        file_hashes[name] = h;
        combined += name + "\n" + h + "\n";
    }
    manifest["files"] = std::move(file_hashes);
    manifest["content_hash"] = sha256_hex(combined);
    {
        std::ofstream out(outdir / "manifest.json", std::ios::binary);
        if (!out) throw error("cannot write " + (outdir / "manifest.json").string());
        out << manifest.dump(2) << "\n";
    }

    RunOutcome outcome;
    outcome.pass = result.pass();
    outcome.outdir = outdir;
    for (const auto& c : result.checks)
        if (!c.pass) outcome.failed_checks.push_back(c.name);
    return outcome;
}

namespace detail {

inline std::size_t first_differing_line(const std::string& a, const std::string& b) {
    std::size_t line = 1, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] != b[j]) return line;
        if (a[i] == '\n') ++line;
        ++i;
        ++j;
    }
    return i == a.size() && j == b.size() ? 0 : line;
}

} // namespace detail

// Re-run the experiment embedded in a manifest and require the regenerated
// CSVs to be byte-identical to the files beside the manifest.
inline void replay(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw error("cannot read manifest " + manifest_path.string());
    ordered_json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw error("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!manifest.is_object() || !manifest.contains("config"))
        throw error("manifest has no embedded config");

    const ExperimentResult result = run_experiment(manifest["config"]);
    const std::filesystem::path dir = manifest_path.parent_path();
    for (const auto& [name, bytes] : artifact_files(result)) {
        if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
        std::ifstream orig(dir / name, std::ios::binary);
        if (!orig) throw replay_mismatch(name, 0, "replay: original file '" + name + "' is missing");
        std::stringstream buf;
        buf << orig.rdbuf();
        const std::string original = buf.str();
        if (original != bytes) {
            const std::size_t line = detail::first_differing_line(original, bytes);
            throw replay_mismatch(name, line,
                                  "replay: '" + name + "' differs from the regenerated output at line " +
                                      std::to_string(line));
        }
    }
}

} // namespace loggas
