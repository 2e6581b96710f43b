#include <cmath>
#include <numbers>
#include <stdexcept>

#include "countshrink/specfun.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "random.hpp"

using namespace countshrink;
using testutil::rel_diff;

TEST_CASE("log_beta reference values") {
    CHECK(specfun::log_beta(1.0, 1.0) == doctest::Approx(0.0));
    CHECK(specfun::log_beta(0.5, 0.5) == doctest::Approx(std::log(std::numbers::pi)).epsilon(1e-14));
    const double ref = oracle::lgamma_recurrence(1.5) + oracle::lgamma_recurrence(200.5) -
                       oracle::lgamma_recurrence(202.0);
    CHECK(rel_diff(specfun::log_beta(1.5, 200.5), ref) < 1e-12);
}

TEST_CASE("log_beta is finite for huge arguments") {
    for (double a : {1e3, 1e5, 1e6})
        for (double b : {0.5, 7.0, 1e6}) CHECK(std::isfinite(specfun::log_beta(a, b)));
}

TEST_CASE("log_beta rejects nonpositive arguments") {
    CHECK_THROWS_AS(specfun::log_beta(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(specfun::log_beta(1.0, -2.0), std::domain_error);
}

TEST_CASE("gauss_2f1 closed forms") {
    CHECK(specfun::gauss_2f1(2.5, 1.0, 3.0, 0.0) == 1.0);
    CHECK(specfun::gauss_2f1(0.0, 1.0, 3.0, 0.9) == doctest::Approx(1.0));
    CHECK(specfun::gauss_2f1(1.0, 1.0, 2.0, 0.5) == doctest::Approx(-std::log(0.5) / 0.5).epsilon(1e-12));
    // Same identity on the quadrature branch.
    for (double w : {0.6, 0.9, 0.999})
        CHECK(rel_diff(specfun::gauss_2f1(1.0, 1.0, 2.0, w), -std::log1p(-w) / w) < 1e-11);
}

TEST_CASE("gauss_2f1 near w = 1 matches the Euler-integral oracle") {
    const double got = specfun::gauss_2f1(2.5, 1.0, 6.5, 0.99);
    CHECK(rel_diff(got, oracle::gauss_2f1(2.5, 1.0, 6.5, 0.99)) < 1e-10);

    // 1 - w = 1e-12 is only representable through the split form.
    const double lw = specfun::log_gauss_2f1_split(20.0, 1.0, 4.5, 1.0 - 1e-12, 1e-12);
    const double ref = oracle::log_gh_integral(1.0, 3.5, 1e-12, 20.0) - (std::lgamma(1.0) + std::lgamma(3.5) - std::lgamma(4.5));
    CHECK(rel_diff(lw, ref) < 1e-10);
}

TEST_CASE("gauss_2f1 with very large c") {
    // With b = 1 the terms are (a)_n / (c)_n w^n; for c >> 1 they fall off like (w a / c)^n.
    auto excess = [](double a, double c, double w) {
        long double term = 1.0L, sum = 0.0L;
        for (int n = 0; n < 200; ++n) {
            term *= (static_cast<long double>(a) + n) / (static_cast<long double>(c) + n) * w;
            sum += term;
        }
        return static_cast<double>(std::log1p(sum));
    };
    for (double c : {1e5, 2.3e6, 1.3e7})
        for (double w : {0.75, 0.99, 0.999999})
            // Absolute error in the log is relative error in 2F1.
            CHECK(std::abs(specfun::log_gauss_2f1(2.0, 1.0, c, w) - excess(2.0, c, w)) < 1e-13);
    const std::vector<double> cs{3.5, 1e3, 2.3e6, 1.3e7};
    const auto batch = specfun::log_gauss_2f1_batch(2.0, 1.0, cs, 0.9, 0.1);
    for (std::size_t i = 0; i < cs.size(); ++i)
        CHECK(std::abs(batch[i] - specfun::log_gauss_2f1(2.0, 1.0, cs[i], 0.9)) < 1e-13);
}

TEST_CASE("gauss_2f1 domain and budget errors") {
    CHECK_THROWS_AS(specfun::gauss_2f1(1.0, 2.0, 2.0, 0.3), std::domain_error);  // c == b
    CHECK_THROWS_AS(specfun::gauss_2f1(1.0, 1.0, 2.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(specfun::gauss_2f1(1.0, 1.0, 2.0, -0.1), std::domain_error);
    CHECK_THROWS_AS(specfun::gauss_2f1(-1.0, 1.0, 2.0, 0.1), std::domain_error);
    specfun::EvalControl tight;
    tight.max_terms = 2;
    CHECK_THROWS_AS(specfun::gauss_2f1(3.0, 1.0, 2.0, 0.5, tight), NonConvergenceError);
}

TEST_CASE("batched log 2F1 equals the scalar path") {
    const std::vector<double> c{1.5, 2.5, 7.5, 40.5, 300.5};
    for (double w : {0.2, 0.75, 0.9999}) {
        const auto batch = specfun::log_gauss_2f1_batch(3.0, 1.0, c, w, 1.0 - w);
        for (std::size_t i = 0; i < c.size(); ++i)
            CHECK(std::abs(batch[i] - specfun::log_gauss_2f1_split(3.0, 1.0, c[i], w, 1.0 - w)) < 1e-12);
    }
}

TEST_CASE("upper incomplete gamma") {
    for (double x : {0.01, 0.5, 3.0, 40.0})
        CHECK(rel_diff(specfun::upper_inc_gamma(1.0, x), std::exp(-x)) < 1e-14);
    CHECK(specfun::upper_inc_gamma(0.0, 1.0) == doctest::Approx(0.2193839).epsilon(1e-7));
    CHECK(rel_diff(specfun::upper_inc_gamma(0.0, 1.0), oracle::exp_e1(1.0)) < 1e-11);

    const double g = specfun::upper_inc_gamma(-0.5, 2.0);
    CHECK(rel_diff(g, oracle::upper_inc_gamma(-0.5, 2.0)) < 1e-10);
    const double lhs = specfun::upper_inc_gamma(0.5, 2.0);
    CHECK(rel_diff(lhs, -0.5 * g + std::pow(2.0, -0.5) * std::exp(-2.0)) < 1e-12);

    CHECK_THROWS_AS(specfun::upper_inc_gamma(0.5, 0.0), std::domain_error);
    // log form stays finite where the value underflows.
    CHECK(std::isfinite(specfun::log_upper_inc_gamma(-3.5, 800.0)));
}

TEST_CASE("exponential integral") {
    CHECK(specfun::exp_e1(1.0) == doctest::Approx(0.2193839344).epsilon(1e-9));
    for (double x : {1.0, 10.0, 0.01}) {
        const double e1 = specfun::exp_e1(x);
        CHECK(e1 > 0.5 * std::exp(-x) * std::log1p(2.0 / x));
        CHECK(e1 < std::exp(-x) * std::log1p(1.0 / x));
        CHECK(rel_diff(e1, oracle::exp_e1(x)) < 1e-10);
    }
    CHECK_THROWS_AS(specfun::exp_e1(0.0), std::domain_error);
}

TEST_CASE("digamma") {
    constexpr double euler_gamma = 0.57721566490153286;
    CHECK(specfun::digamma(1.0) == doctest::Approx(-euler_gamma).epsilon(1e-14));
    CHECK(specfun::digamma(2.0) == doctest::Approx(1.0 - euler_gamma).epsilon(1e-14));
    CHECK(std::abs(specfun::digamma(1000.0) - (std::log(1000.0) - 1.0 / 2000.0 - 1.0 / 12e6)) < 1e-10);
    CHECK_THROWS_AS(specfun::digamma(0.0), std::domain_error);
}

TEST_CASE("property: 2F1 is nondecreasing in w") {
    testutil::Draws rng(11);
    for (int t = 0; t < 200; ++t) {
        const double a = rng.uniform(0.0, 10.0), b = rng.uniform(0.1, 5.0);
        const double c = b + rng.uniform(0.05, 20.0);
        double prev = 0.0;
        for (double w = 0.0; w < 0.999; w += 0.037) {
            const double v = specfun::log_gauss_2f1(a, b, c, w);
            CHECK(v >= prev - 1e-13 * std::max(1.0, std::abs(prev)));
            prev = v;
        }
    }
}

TEST_CASE("property: series and Euler-integral quadrature agree for w <= 0.5") {
    testutil::Draws rng(12);
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
        const double a = rng.uniform(0.0, 10.0), b = rng.uniform(0.1, 5.0);
        const double c = b + rng.uniform(0.05, 20.0);
        const double w = rng.uniform(0.0, 0.5);
        if (rel_diff(specfun::gauss_2f1(a, b, c, w), oracle::gauss_2f1(a, b, c, w)) > 1e-9) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: quadrature branch agrees with the oracle for w > 0.5") {
    testutil::Draws rng(13);
    int bad = 0;
    for (int t = 0; t < 300; ++t) {
        const double a = rng.uniform(0.0, 20.0), b = rng.uniform(0.5, 3.0);
        const double c = b + rng.uniform(0.5, 60.0);
        const double one_minus_w = rng.log_uniform(1e-6, 0.5);
        const double got = specfun::log_gauss_2f1_split(a, b, c, 1.0 - one_minus_w, one_minus_w);
        const double ref = oracle::log_gh_integral(b, c - b, one_minus_w, a) -
                           (oracle::lgamma_recurrence(b) + oracle::lgamma_recurrence(c - b) -
                            oracle::lgamma_recurrence(c));
        if (std::abs(got - ref) > 1e-9 * std::max(1.0, std::abs(ref))) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: incomplete-gamma recurrence") {
    testutil::Draws rng(14);
    for (int t = 0; t < 500; ++t) {
        const double s = rng.uniform(-6.0, 0.0), x = rng.log_uniform(1e-3, 60.0);
        const double up = specfun::upper_inc_gamma(s + 1.0, x);
        const double resid = up - s * specfun::upper_inc_gamma(s, x) - std::pow(x, s) * std::exp(-x);
        CHECK(std::abs(resid) <= 1e-10 * up);
    }
}

TEST_CASE("property: E1 sandwich at 1e4 random points") {
    testutil::Draws rng(15);
    int bad = 0;
    for (int t = 0; t < 10000; ++t) {
        const double x = rng.log_uniform(1e-4, 50.0);
        const double e1 = specfun::exp_e1(x);
        if (!(e1 > 0.5 * std::exp(-x) * std::log1p(2.0 / x) && e1 < std::exp(-x) * std::log1p(1.0 / x))) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("property: digamma recurrence") {
    testutil::Draws rng(16);
    for (int t = 0; t < 1000; ++t) {
        const double x = rng.log_uniform(1e-3, 1e4);
        const double lhs = specfun::digamma(x + 1.0) - specfun::digamma(x);
        CHECK(std::abs(lhs - 1.0 / x) <= 1e-12 * std::max(1.0, 1.0 / x));
    }
}
