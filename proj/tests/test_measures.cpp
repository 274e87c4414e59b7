#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "loggas/measures.hpp"
#include "loggas/rng.hpp"

using namespace loggas;
namespace {

GridDensity semicircle_density(std::size_t m = 4096) {
    std::vector<double> rho(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double x = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(m);
        const double s = 4.0 - x * x;
        rho[i] = s > 0.0 ? std::sqrt(s) / (2.0 * std::numbers::pi) : 0.0;
    }
    GridDensity out(-2.0, 2.0, std::move(rho));
    out.normalize();
    return out;
}

// closed-form semicircle CDF, used as an independent oracle
double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + (x * std::sqrt(4.0 - x * x) / 2.0 + 2.0 * std::asin(x / 2.0)) / (2.0 * std::numbers::pi);
}

double semicircle_quantile(double level) {
    double lo = -2.0, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (semicircle_cdf(mid) < level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("quantiles of particle positions", "[measures]") {
    const QuantileFunction qf = to_quantiles(std::vector<double>{1.0, 2.0, 3.0}, 3);
    REQUIRE(qf.size() == 3);
    CHECK(qf.v[0] == 1.0);
    CHECK(qf.v[1] == 2.0);
    CHECK(qf.v[2] == 3.0);

    const QuantileFunction st = to_quantiles(std::vector<double>{0.0, 1.0}, 4);
    CHECK(st.v[0] == 0.0);
    CHECK(st.v[1] == 0.0);
    CHECK(st.v[2] == 1.0);
    CHECK(st.v[3] == 1.0);
}

TEST_CASE("quantiles of the uniform density", "[measures]") {
    GridDensity uni(0.0, 1.0, std::vector<double>(129, 1.0));
    uni.normalize();
    const auto qf = to_quantiles(uni, 4);
    CHECK(qf.v[0] == Catch::Approx(0.125).margin(1e-10));
    CHECK(qf.v[1] == Catch::Approx(0.375).margin(1e-10));
    CHECK(qf.v[2] == Catch::Approx(0.625).margin(1e-10));
    CHECK(qf.v[3] == Catch::Approx(0.875).margin(1e-10));
}

TEST_CASE("quantiles of the semicircle match CDF inversion", "[measures]") {
    const auto mu = semicircle_density();
    const auto qf = to_quantiles(mu, 8);
    CHECK(qf.v[3] == Catch::Approx(-qf.v[4]).margin(1e-9));
    for (std::size_t k = 0; k < 8; ++k) {
        const double expected = semicircle_quantile((static_cast<double>(k) + 0.5) / 8.0);
        CHECK(qf.v[k] == Catch::Approx(expected).margin(2e-6));
    }
}

TEST_CASE("quantile round trip is exact for piecewise-linear densities", "[measures]") {
    // tent density on [0,2]: rho = x on [0,1], 2-x on [1,2]; F(x) = x^2/2 below the kink
    const std::size_t m = 256;
    std::vector<double> rho(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double x = 2.0 * static_cast<double>(i) / static_cast<double>(m);
        rho[i] = x <= 1.0 ? x : 2.0 - x;
    }
    GridDensity tent(0.0, 2.0, std::move(rho));
    tent.normalize();
    const std::size_t q = 64;
    const auto qf = to_quantiles(tent, q);
    for (std::size_t k = 0; k < q; ++k) {
        const double level = (static_cast<double>(k) + 0.5) / static_cast<double>(q);
        const double expected = level <= 0.5 ? std::sqrt(2.0 * level) : 2.0 - std::sqrt(2.0 * (1.0 - level));
        CHECK(qf.v[k] == Catch::Approx(expected).margin(1e-10));
    }
}

TEST_CASE("quantile pushforward round trip on a smooth monotone map", "[measures]") {
    // push uniform(0,1) through g(u) = u + 0.25 sin(pi u); density 1/g'(u(x))
    auto g = [](double u) { return u + 0.25 * std::sin(std::numbers::pi * u); };
    auto gp = [](double u) { return 1.0 + 0.25 * std::numbers::pi * std::cos(std::numbers::pi * u); };
    const std::size_t m = 4096;
    std::vector<double> rho(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(m);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) < x ? lo : hi) = mid;
        }
        rho[i] = 1.0 / gp(0.5 * (lo + hi));
    }
    GridDensity mu(0.0, 1.0, std::move(rho));
    mu.normalize();
    const std::size_t q = 128;
    const auto qf = to_quantiles(mu, q);
    for (std::size_t k = 0; k < q; ++k)
        CHECK(qf.v[k] == Catch::Approx(g((static_cast<double>(k) + 0.5) / q)).margin(1e-6));
}

TEST_CASE("wasserstein of point masses", "[measures]") {
    const QuantileFunction da(std::vector<double>{1.5});
    const QuantileFunction db(std::vector<double>{-0.75});
    CHECK(wasserstein(1.0, da, db) == Catch::Approx(2.25));
    CHECK(wasserstein(2.0, da, db) == Catch::Approx(2.25));
}

TEST_CASE("wasserstein translation identity", "[measures]") {
    const auto mu = semicircle_density(1024);
    const double c = 0.37;
    GridDensity nu(mu.a + c, mu.b + c, mu.rho);
    CHECK(wasserstein(2.0, mu, nu, 1024) == Catch::Approx(c).margin(1e-12));
    CHECK(wasserstein(1.0, mu, nu, 1024) == Catch::Approx(c).margin(1e-12));
}

TEST_CASE("wasserstein of dilated semicircles", "[measures]") {
    const auto base = semicircle_density(2048);
    auto scaled = [&](double s) {
        return GridDensity(base.a * s, base.b * s, base.rho); // same values: mass preserved, shape dilated
    };
    const auto m1 = scaled(0.6);
    const auto m2 = scaled(1.3);
    // W2 = |s1 - s2| * sqrt(second moment of the standard semicircle) = 0.7
    CHECK(wasserstein(2.0, m1, m2, 4096) == Catch::Approx(0.7).epsilon(1e-3));
}

TEST_CASE("wasserstein dilation scaling is exact on quantile pairs", "[measures]") {
    Rng rng(11);
    std::vector<double> av(64), bv(64);
    double xa = -3.0, xb = -2.0;
    for (std::size_t i = 0; i < 64; ++i) {
        xa += rng.uniform();
        xb += 0.5 * rng.uniform();
        av[i] = xa;
        bv[i] = xb;
    }
    const QuantileFunction qa(av), qb(bv);
    const double w = wasserstein(2.0, qa, qb);
    const double s = 2.5;
    std::vector<double> sav(av), sbv(bv);
    for (auto& x : sav) x *= s;
    for (auto& x : sbv) x *= s;
    const double ws = wasserstein(2.0, QuantileFunction(sav), QuantileFunction(sbv));
    CHECK(ws == Catch::Approx(s * w).epsilon(1e-13));
    CHECK(wasserstein(2.0, qa, qa) == 0.0);
    CHECK(wasserstein(2.0, qa, qb) == Catch::Approx(wasserstein(2.0, qb, qa)).epsilon(1e-15));
}

TEST_CASE("wasserstein argument validation", "[measures]") {
    const QuantileFunction qa(std::vector<double>{0.0, 1.0});
    const QuantileFunction qb(std::vector<double>{0.0});
    CHECK_THROWS_AS(wasserstein(2.0, qa, qb), invalid_argument);
    CHECK_THROWS_AS(wasserstein(0.5, qa, qa), invalid_argument);
}

TEST_CASE("wasserstein quantile refinement settles", "[measures]") {
    const auto mu = semicircle_density(2048);
    GridDensity nu(mu.a + 0.2, mu.b + 0.2, mu.rho);
    std::vector<double> sq(nu.rho.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = nu.rho[i] * (1.2 - nu.node(i) / 10.0);
    GridDensity nu2(nu.a, nu.b, sq);
    nu2.normalize();
    const double w256 = wasserstein(2.0, mu, nu2, 256);
    const double w512 = wasserstein(2.0, mu, nu2, 512);
    const double w1024 = wasserstein(2.0, mu, nu2, 1024);
    const double w2048 = wasserstein(2.0, mu, nu2, 2048);
    CHECK(std::abs(w1024 - w2048) <= std::abs(w256 - w512) + 1e-12);
}

TEST_CASE("kde: symmetric bimodal pair", "[measures]") {
    const auto mu = kde_density({-1.0, 1.0}, 1024, 0.3);
    CHECK(mu.mass() == Catch::Approx(1.0).margin(1e-12));
    const std::size_t n = mu.rho.size();
    for (std::size_t i = 0; i < n; ++i)
        CHECK(mu.rho[i] == Catch::Approx(mu.rho[n - 1 - i]).margin(1e-12));
    CHECK(mu(1.0) > 2.0 * mu(0.0));
    CHECK(mu(-1.0) > 2.0 * mu(0.0));
}

TEST_CASE("kde: tight cluster is unimodal with unit mass", "[measures]") {
    Rng rng(42);
    std::vector<double> xs(200);
    for (auto& x : xs) x = 1e-3 * (rng.uniform() - 0.5);
    const auto mu = kde_density(xs, 512);
    CHECK(mu.mass() == Catch::Approx(1.0).margin(1e-12));
    // the half-max superlevel set is a single contiguous run
    const double half = 0.5 * *std::max_element(mu.rho.begin(), mu.rho.end());
    std::size_t runs = 0;
    bool in_run = false;
    for (const double r : mu.rho) {
        const bool above = r > half;
        if (above && !in_run) ++runs;
        in_run = above;
    }
    CHECK(runs == 1);
}

TEST_CASE("kde of semicircle samples converges in W2", "[measures]") {
    Rng rng(20240816);
    const std::size_t n = 10000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = semicircle_quantile(rng.uniform());
    const auto kde = kde_density(xs, 2048);
    const auto truth = semicircle_density(2048);
    CHECK(wasserstein(2.0, kde, truth, 2048) <= 0.05);
}

TEST_CASE("cdf densifier reconstructs the semicircle", "[measures]") {
    const auto truth = semicircle_density(2048);
    const auto qf = to_quantiles(truth, 1024);
    const auto rebuilt = densify_quantiles_cdf(qf, 2048);
    CHECK(rebuilt.mass() == Catch::Approx(1.0).margin(1e-12));
    CHECK(wasserstein(2.0, rebuilt, truth, 2048) <= 2e-3);
}

TEST_CASE("gap densifier reconstructs the semicircle", "[measures]") {
    const auto truth = semicircle_density(2048);
    const auto qf = to_quantiles(truth, 1024);
    const auto rebuilt = densify_quantiles_gap(qf, 2048);
    CHECK(rebuilt.mass() == Catch::Approx(1.0).margin(1e-12));
    CHECK(wasserstein(2.0, rebuilt, truth, 2048) <= 5e-3);
}

TEST_CASE("grid density guards", "[measures]") {
    CHECK_THROWS_AS(GridDensity(1.0, 0.0, {1.0, 1.0}), invalid_argument);
    CHECK_THROWS_AS(GridDensity(0.0, 1.0, {1.0}), invalid_argument);
    CHECK_THROWS_AS(GridDensity(0.0, 1.0, {1.0, -0.5}), invalid_argument);
    GridDensity zero(0.0, 1.0, {0.0, 0.0});
    CHECK_THROWS_AS(zero.normalize(), invalid_argument);
    CHECK_THROWS_AS(to_quantiles(zero, 4), invalid_argument);
}
