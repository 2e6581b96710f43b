#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/random/cauchy_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "countshrink/eb_fit.hpp"
#include "countshrink/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "random.hpp"

using namespace countshrink;
using testutil::rel_diff;

namespace {

// Counts from the gamma = 1 hierarchy via its half-Cauchy representation:
// lambda ~ C+(0, 1), theta ~ Ga(alpha, scale lambda^2 tau^2), y ~ Poi(theta).
CountDataset horseshoe_counts(std::size_t n, double tau, double alpha, unsigned seed) {
    boost::random::mt19937 eng(seed);
    boost::random::cauchy_distribution<double> cauchy(0.0, 1.0);
    std::vector<std::int64_t> y(n);
    for (auto& v : y) {
        const double lam = std::abs(cauchy(eng));
        const double theta = boost::random::gamma_distribution<double>(alpha, lam * lam * tau * tau)(eng);
        v = theta > 0.0 ? boost::random::poisson_distribution<std::int64_t, double>(theta)(eng) : 0;
    }
    return CountDataset::from_counts(std::move(y));
}

CountDataset sparse_fixture() {
    std::vector<std::int64_t> y(180, 0);
    for (int i = 0; i < 12; ++i) y.push_back(1);
    for (int i = 0; i < 8; ++i) y.push_back(6 + 2 * i);
    return CountDataset::from_counts(std::move(y));
}

}  // namespace

TEST_CASE("all-zero counts drive tau to its lower bound") {
    const auto data = CountDataset::from_counts(std::vector<std::int64_t>(100, 0));
    const FitConfig cfg;
    const auto r = fit(data, cfg);
    CHECK(r.params.tau == doctest::Approx(cfg.tau_min).epsilon(1e-6));
    CHECK(std::isfinite(r.log_marginal));
}

TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(fit(CountDataset{}, FitConfig{}), DataError);
}

TEST_CASE("FitConfig validation") {
    FitConfig bad;
    bad.grid_points = 1;
    CHECK_THROWS(bad.validate());
    bad = FitConfig{};
    bad.tau_min = 0.5;
    bad.tau_max = 0.1;
    CHECK_THROWS(bad.validate());
    bad = FitConfig{};
    bad.gamma_min = 3.0;
    bad.gamma_max = 2.0;
    CHECK_THROWS(bad.validate());
    const auto fixed = FitConfig::fixed_gamma(1.0);
    CHECK(fixed.gamma_min == 1.0);
    CHECK(fixed.gamma_max == 1.0);
    CHECK_NOTHROW(fixed.validate());
}

TEST_CASE("returned optimum dominates every trace entry and the no-shrinkage corner") {
    const auto data = sparse_fixture();
    const auto r = fit(data, FitConfig{});
    const auto counts = tabulate(data.y);
    REQUIRE(!r.trace.empty());
    for (const auto& e : r.trace) CHECK(e.objective <= r.log_marginal);
    CHECK(r.log_marginal == doctest::Approx(log_marginal_likelihood(counts, r.params)).epsilon(1e-12));
    CHECK(r.log_marginal >= log_marginal_likelihood(counts, GHParams{0.5, 0.0, 1.0}));

    // Grid nodes, recomputed independently of the trace.
    const FitConfig cfg;
    for (int i = 0; i < cfg.grid_points; i += 3)
        for (int j = 0; j < cfg.grid_points; j += 3) {
            const double u = static_cast<double>(i) / (cfg.grid_points - 1);
            const double tau = std::exp(std::log(cfg.tau_min) + u * (std::log(cfg.tau_max) - std::log(cfg.tau_min)));
            const double g = cfg.gamma_min + static_cast<double>(j) / (cfg.grid_points - 1) * (cfg.gamma_max - cfg.gamma_min);
            CHECK(log_marginal_likelihood(counts, GHParams{0.5, g, tau}) <= r.log_marginal + 1e-9);
        }
}

TEST_CASE("log_marginal_likelihood is the weighted sum of scalar terms") {
    const auto data = sparse_fixture();
    const auto counts = tabulate(data.y);
    const GHParams p{0.5, 2.0, 0.1};
    double direct = 0.0;
    for (auto v : data.y) direct += marginal_log_pmf(v, p);
    CHECK(log_marginal_likelihood(counts, p) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("fit is deterministic and thread-count independent") {
    const auto data = horseshoe_counts(800, 0.3, 0.5, 4);
    FitConfig cfg;
    const auto a = fit(data, cfg);
    const auto b = fit(data, cfg);
    cfg.threads = 3;
    const auto c = fit(data, cfg);
    CHECK(a.params.tau == b.params.tau);
    CHECK(a.params.gamma == b.params.gamma);
    CHECK(a.log_marginal == b.log_marginal);
    CHECK(a.trace.size() == b.trace.size());
    CHECK(a.params.tau == c.params.tau);
    CHECK(a.params.gamma == c.params.gamma);
    CHECK(a.log_marginal == c.log_marginal);
}

TEST_CASE("fixed gamma holds gamma exactly") {
    const auto r = fit(sparse_fixture(), FitConfig::fixed_gamma(1.0));
    CHECK(r.params.gamma == 1.0);
}

TEST_CASE("fit_alpha moves alpha inside its range") {
    FitConfig cfg;
    cfg.fit_alpha = true;
    const auto r = fit(horseshoe_counts(500, 0.5, 2.0, 8), cfg);
    CHECK(r.params.alpha >= cfg.alpha_min);
    CHECK(r.params.alpha <= cfg.alpha_max);
    const auto pinned = fit(horseshoe_counts(500, 0.5, 2.0, 8), FitConfig{});
    CHECK(r.log_marginal >= pinned.log_marginal - 1e-9);
}

TEST_CASE("tau recovery on data simulated from the model") {
    std::vector<double> taus;
    for (unsigned seed = 0; seed < 20; ++seed)
        taus.push_back(fit(horseshoe_counts(5000, 0.2, 0.5, 1000 + seed), FitConfig{}).params.tau);
    std::nth_element(taus.begin(), taus.begin() + 10, taus.end());
    const double hi = taus[10];
    const double lo = *std::max_element(taus.begin(), taus.begin() + 10);
    const double median = 0.5 * (lo + hi);
    MESSAGE("median tau-hat " << median);
    CHECK(std::abs(median - 0.2) <= 0.1);
}

TEST_CASE("shrink examples") {
    const auto s0 = shrink(CountDataset::from_counts({0, 0, 0}), GHParams{0.5, 1.0, 0.3});
    REQUIRE(s0.kappa_mean.size() == 3);
    CHECK(s0.kappa_mean[0] == s0.kappa_mean[1]);
    CHECK(s0.kappa_mean[1] == s0.kappa_mean[2]);
    CHECK(s0.theta_mean[0] == s0.theta_mean[2]);

    const auto s1 = shrink(CountDataset::from_counts({0, 10}), GHParams{0.5, 1.0, 0.05});
    CHECK(s1.inclusion[1] > s1.inclusion[0]);

    const auto s2 = shrink(CountDataset::from_counts({5}), GHParams{0.5, 2.0, 0.3});
    CHECK(rel_diff(s2.theta_mean[0], oracle::theta_mean_2d(5, 0.5, 2.0, 0.3)) < 1e-6);
}

TEST_CASE("property: distinct-count caching equals per-observation evaluation") {
    testutil::Draws rng(31);
    for (int t = 0; t < 10; ++t) {
        std::vector<std::int64_t> y(300);
        for (auto& v : y) v = rng.uniform(0.0, 1.0) < 0.7 ? 0 : rng.integer(0, 40);
        const GHParams p{0.5, rng.uniform(0.0, 10.0), rng.log_uniform(1e-3, 1.0)};
        const auto s = shrink(CountDataset::from_counts(y), p);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double k = posterior_kappa_moment(1, y[i], p);
            CHECK(s.kappa_mean[i] == doctest::Approx(k).epsilon(1e-12));
            CHECK(s.theta_mean[i] == doctest::Approx((1.0 - k) * (y[i] + 0.5)).epsilon(1e-10));
            CHECK(s.inclusion[i] == doctest::Approx(1.0 - k).epsilon(1e-10));
        }
    }
}
