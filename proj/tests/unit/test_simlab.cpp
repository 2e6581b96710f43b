#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "countshrink/simlab.hpp"
#include "doctest.h"

using namespace countshrink;

TEST_CASE("gen_sparse_t3") {
    SimConfig cfg;
    cfg.omega = 0.0;
    const auto none = gen_sparse_t3(cfg, 0);
    CHECK(std::all_of(none.theta.begin(), none.theta.end(), [](double t) { return t == 0.0; }));
    CHECK(std::all_of(none.y.begin(), none.y.end(), [](std::int64_t y) { return y == 0; }));

    cfg.n = 100000;
    cfg.omega = 1.0;
    const auto all = gen_sparse_t3(cfg, 0);
    const double mean = std::accumulate(all.theta.begin(), all.theta.end(), 0.0) / cfg.n;
    CHECK(mean == doctest::Approx(2.0 * std::sqrt(3.0) / std::numbers::pi).epsilon(0.02));

    cfg.omega = 0.1;
    const auto sparse = gen_sparse_t3(cfg, 1);
    const double zeros = static_cast<double>(std::count(sparse.theta.begin(), sparse.theta.end(), 0.0));
    const double sd = std::sqrt(cfg.n * 0.9 * 0.1);
    CHECK(std::abs(zeros - 0.9 * cfg.n) <= 3.0 * sd);
    for (std::size_t i = 0; i < cfg.n; ++i)
        if (sparse.theta[i] == 0.0) CHECK(sparse.y[i] == 0);
}

TEST_CASE("gen_contaminated_zip") {
    SimConfig cfg;
    cfg.omega = 0.0;
    cfg.contamination_p = 0.0;
    const auto clean = gen_contaminated_zip(cfg, 0);
    CHECK(std::none_of(clean.truth.begin(), clean.truth.end(), [](bool b) { return b; }));
    CHECK(std::all_of(clean.y.begin(), clean.y.end(), [](std::int64_t y) { return y == 0; }));

    cfg.n = 100000;
    cfg.contamination_p = 0.1;
    const auto dirty = gen_contaminated_zip(cfg, 0);
    CHECK(std::count(dirty.y.begin(), dirty.y.end(), 1) == 10000);
    CHECK(std::count(dirty.y.begin(), dirty.y.end(), 0) == 90000);
    CHECK(std::none_of(dirty.truth.begin(), dirty.truth.end(), [](bool b) { return b; }));
}

TEST_CASE("non-null counts follow Binomial(n, omega) across replications") {
    SimConfig cfg;
    cfg.n = 200;
    cfg.omega = 0.2;
    constexpr int reps = 4000;
    // Bins: <=32, 33..47 singly, >=48, so every expected count is comfortably large.
    const int lo = 32, hi = 48;
    std::vector<double> observed(hi - lo + 1, 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto s = gen_contaminated_zip(cfg, r);
        const int k = static_cast<int>(std::count(s.truth.begin(), s.truth.end(), true));
        observed[std::clamp(k, lo, hi) - lo] += 1.0;
    }
    const boost::math::binomial_distribution<double> binom(200, 0.2);
    double chi2 = 0.0;
    for (int b = lo; b <= hi; ++b) {
        double p = b == lo ? cdf(binom, lo) : b == hi ? cdf(complement(binom, hi - 1)) : pdf(binom, b);
        const double e = p * reps;
        chi2 += (observed[b - lo] - e) * (observed[b - lo] - e) / e;
    }
    const boost::math::chi_squared_distribution<double> dist(hi - lo);
    const double pval = cdf(complement(dist, chi2));
    MESSAGE("chi2 " << chi2 << " p " << pval);
    CHECK(pval > 0.01);
}

TEST_CASE("generators are reproducible per (seed, rep, cell)") {
    SimConfig cfg;
    const auto a = gen_sparse_t3(cfg, 17, 2), b = gen_sparse_t3(cfg, 17, 2), c = gen_sparse_t3(cfg, 18, 2);
    CHECK(a.theta == b.theta);
    CHECK(a.y == b.y);
    CHECK(a.theta != c.theta);
    cfg.seed += 1;
    CHECK(gen_sparse_t3(cfg, 17, 2).theta != a.theta);
}

TEST_CASE("naive loss matches the Poisson variance identity") {
    SimOptions opt;
    opt.replications = 400;
    const auto cells = run_table1({Method::Naive}, {200}, {0.1}, opt);
    REQUIRE(cells.size() == 1);
    const auto& rep = cells[0].reports[0];
    CHECK(rep.method == method_name(Method::Naive));
    CHECK(rep.per_rep_losses.size() == 400);
    // E 100/n ||y - theta||^2 = 100 omega E|t3|; per-rep sd from the losses themselves.
    const double expected = 100.0 * 0.1 * 2.0 * std::sqrt(3.0) / std::numbers::pi;
    CHECK(std::abs(rep.abr_mean - expected) <= 3.0 * rep.abr_sd / std::sqrt(400.0));
    const auto [m, s] = mean_sd(rep.per_rep_losses);
    CHECK(rep.abr_mean == m);
    CHECK(rep.abr_sd == s);
}

TEST_CASE("table1 driver is reproducible across runs and thread counts") {
    SimOptions opt;
    opt.replications = 12;
    opt.threads = 1;
    const std::vector<Method> methods{Method::GH, Method::Robbins, Method::Global, Method::ZIP, Method::Naive};
    const auto a = run_table1(methods, {200}, {0.15}, opt);
    opt.threads = 3;
    const auto b = run_table1(methods, {200}, {0.15}, opt);
    for (std::size_t k = 0; k < methods.size(); ++k) CHECK(a[0].reports[k].per_rep_losses == b[0].reports[k].per_rep_losses);
}

TEST_CASE("GH beats the naive estimator on sparse data") {
    // The GH-versus-global ordering is part of the table1 acceptance report.
    SimOptions opt;
    opt.replications = 40;
    const auto cells = run_table1({Method::GH, Method::Naive}, {200}, {0.1, 0.2}, opt);
    for (const auto& c : cells) CHECK(c.reports[0].abr_mean < c.reports[1].abr_mean);
}

TEST_CASE("table2 driver") {
    SimOptions opt;
    opt.replications = 6;
    const auto omegas = table2_omegas();
    REQUIRE(omegas.size() == 10);
    CHECK(omegas.front() == doctest::Approx(0.1));
    CHECK(omegas.back() == doctest::Approx(0.3));
    const auto a = run_table2({0.1, 0.3}, 200, 0.1, opt);
    const auto b = run_table2({0.1, 0.3}, 200, 0.1, opt);
    REQUIRE(a.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(a[i].reports.size() == 3);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(a[i].reports[k].per_rep == b[i].reports[k].per_rep);
            for (double e : a[i].reports[k].per_rep) CHECK((e >= 0.0 && e <= 200.0));
        }
    }
}

TEST_CASE("type I check rows") {
    const auto rows = run_type1_check(TwoGroupsParams{}, {1.0, 2.0, 5.0}, Type1Options{});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        MESSAGE("gamma " << r.gamma << " empirical " << r.empirical << " bound " << r.bound);
        CHECK(r.draws == 100000);
        CHECK(r.empirical == doctest::Approx(static_cast<double>(r.rejections) / r.draws));
    }
    CHECK(rows[2].bound < rows[0].bound);
    const double p1 = rows[0].empirical, p5 = rows[2].empirical;
    const double se = std::sqrt((p1 * (1 - p1) + p5 * (1 - p5)) / 1e5);
    CHECK(p5 + 2.0 * se < p1);
}

TEST_CASE("mean_sd skips non-finite entries") {
    const auto [m, s] = mean_sd({1.0, 2.0, std::nan(""), 3.0});
    CHECK(m == doctest::Approx(2.0));
    CHECK(s == doctest::Approx(1.0));
}
