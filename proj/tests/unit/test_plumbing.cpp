#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "countshrink/dataset.hpp"
#include "countshrink/errors.hpp"
#include "countshrink/optimize.hpp"
#include "countshrink/parallel.hpp"
#include "countshrink/quadrature.hpp"
#include "countshrink/rng.hpp"
#include "doctest.h"

using namespace countshrink;

TEST_CASE("nelder_mead_max finds interior and boundary optima") {
    const opt::Box box{{-5.0, -5.0}, {5.0, 5.0}};
    auto bowl = [](const std::vector<double>& x) {
        return -(x[0] - 1.0) * (x[0] - 1.0) - 3.0 * (x[1] + 2.0) * (x[1] + 2.0);
    };
    const auto r = opt::nelder_mead_max(bowl, {0.0, 0.0}, {0.5, 0.5}, box, 2000, 1e-14);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-5));
    CHECK(r.value <= 0.0);
    CHECK(r.evaluations >= r.iterations);

    auto ramp = [](const std::vector<double>& x) { return x[0] - x[1]; };
    const auto e = opt::nelder_mead_max(ramp, {0.0, 0.0}, {1.0, 1.0}, box, 2000, 1e-14);
    CHECK(e.x[0] == 5.0);
    CHECK(e.x[1] == -5.0);
    CHECK(box.clamp({9.0, -9.0}) == std::vector<double>{5.0, -5.0});
}

TEST_CASE("brent_max") {
    const auto m = opt::brent_max([](double x) { return std::sin(x); }, 0.0, 3.0);
    CHECK(m.x == doctest::Approx(std::numbers::pi / 2).epsilon(1e-7));
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-12));
    const auto edge = opt::brent_max([](double x) { return x; }, 0.0, 2.0);
    CHECK(edge.x == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("RngStream is keyed and deterministic") {
    auto draw = [](std::uint64_t seed, std::uint64_t cell, std::uint64_t rep, std::uint64_t tag) {
        RngStream r(seed, cell, rep, tag);
        std::vector<double> v;
        for (int i = 0; i < 8; ++i) v.push_back(r.uniform());
        v.push_back(r.normal());
        v.push_back(r.gamma(0.7, 2.0));
        v.push_back(r.student_t(3.0));
        v.push_back(static_cast<double>(r.poisson(4.5)));
        v.push_back(static_cast<double>(r.below(17)));
        return v;
    };
    CHECK(draw(1, 2, 3, 4) == draw(1, 2, 3, 4));
    CHECK(draw(1, 2, 3, 4) != draw(1, 2, 3, 5));
    CHECK(draw(1, 2, 3, 4) != draw(1, 2, 4, 4));
    CHECK(draw(1, 2, 3, 4) != draw(1, 3, 3, 4));
    CHECK(draw(1, 2, 3, 4) != draw(2, 2, 3, 4));

    RngStream r(9, 0, 0);
    CHECK(r.poisson(0.0) == 0);
    double sum = 0.0;
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 20000; ++i) {
        const double u = r.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        sum += u;
        seen.insert(r.below(5));
    }
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
    CHECK(seen == std::set<std::uint64_t>{0, 1, 2, 3, 4});
    CHECK_FALSE(r.bernoulli(0.0));
    CHECK(r.bernoulli(1.0));
}

TEST_CASE("parallel_for covers every index once and propagates exceptions") {
    for (unsigned threads : {1u, 2u, 5u}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, threads);
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    std::atomic<int> ran{0};
    CHECK_THROWS_AS(parallel_for(
                        50,
                        [&](std::size_t i) {
                            ++ran;
                            if (i == 7) throw std::runtime_error("boom");
                        },
                        3),
                    std::runtime_error);
    parallel_for(0, [](std::size_t) { throw std::logic_error("never"); }, 2);
    CHECK(default_threads() >= 1);
}

TEST_CASE("dataset validation and tabulation") {
    CHECK_NOTHROW(CountDataset::from_counts({0, 3}).validate());
    CHECK_THROWS_AS(CountDataset::from_counts({}).validate(), DataError);
    CHECK_THROWS_AS(CountDataset::from_counts({1, -2}).validate(), DataError);
    auto d = CountDataset::from_counts({1, 2});
    d.exposure = 0.0;
    CHECK_THROWS_AS(d.validate(), DataError);
    d.exposure = 3.0;
    d.labels = {"a"};
    CHECK_THROWS_AS(d.validate(), DataError);

    const auto t = tabulate({5, 0, 5, 2, 0, 0});
    CHECK(t.values == std::vector<std::int64_t>{0, 2, 5});
    CHECK(t.weights == std::vector<double>{3.0, 1.0, 2.0});
    CHECK(t.index == std::vector<std::size_t>{2, 0, 2, 1, 0, 0});
    CHECK(t.n() == 6);
}

TEST_CASE("log-space quadrature against closed forms") {
    // Integrands are written in log coordinates, as the special-function code uses them.
    // Beta function, t = e^v: peaked, and singular at t = 0 in the original variable.
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.5, 1.5}, {3.0, 400.0}, {0.01, 2.0}}) {
        auto lf = [&](double v) { return a * v + (b - 1.0) * std::log1p(-std::exp(v)); };
        const auto r = quad::integrate_log(lf, -60.0 / a, 0.0, {-1.0});
        CHECK(r.log_value == doctest::Approx(std::log(boost::math::beta(a, b))).epsilon(1e-11));
        CHECK(r.rel_error <= 1e-13);
    }
    // Magnitude far outside double range: int_0^1 (eps + w s)^-20 ds with eps = 1 - w = 1e-12,
    // using s = e^v.
    const double w = 1.0 - 1e-12, eps = 1.0 - w;
    auto lf = [&](double v) { return v - 20.0 * std::log(eps + w * std::exp(v)); };
    const auto r = quad::integrate_log(lf, -80.0, 0.0, {std::log(eps)});
    const double exact = -19.0 * std::log(eps) + std::log1p(-std::pow(eps / (eps + w), 19.0)) - std::log(19.0 * w);
    CHECK(std::abs(r.log_value - exact) < 1e-12);
    CHECK(std::isfinite(exact));

    auto lfv = [&](double v, double* out) {
        out[0] = lf(v);
        out[1] = 3.0 * v;  // int_0^1 s^2 ds
    };
    const auto batch = quad::integrate_log_batch(lfv, 2, -80.0, 0.0, {std::log(eps)});
    REQUIRE(batch.size() == 2);
    CHECK(std::abs(batch[0].log_value - exact) < 1e-12);
    CHECK(batch[1].log_value == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
}
