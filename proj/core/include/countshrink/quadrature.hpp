#pragma once

// Adaptive Gauss-Kronrod integration of exp(log_f) in log space.
//
// Each panel is summed relative to its own maximum log-integrand and panels are
// merged with log-sum-exp, so integrands whose magnitude spans hundreds of
// orders (e.g. (1 - w t)^-20 with 1 - w = 1e-12) integrate without overflow.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace countshrink::quad {

struct LogIntegral {
    double log_value = -std::numeric_limits<double>::infinity();
    double rel_error = 0.0;
    int intervals = 0;
};

namespace detail {

// 21-point Kronrod rule with its embedded 10-point Gauss rule, laid out as
// 21 symmetric nodes on [-1, 1].
struct KronrodRule {
    std::array<double, 21> node{};
    std::array<double, 21> kronrod_weight{};
    std::array<double, 21> gauss_weight{};  // zero where the node is Kronrod-only
};

const KronrodRule& kronrod21();

struct Panel {
    double lo, hi;
    double log_value;  // log of the panel integral
    double log_error;  // log of its absolute error estimate
};

inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

template <class LogF>
Panel eval_panel(const LogF& log_f, double lo, double hi) {
    const auto& rule = kronrod21();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    std::array<double, 21> lv{};
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < 21; ++j) {
        lv[j] = log_f(mid + half * rule.node[j]);
        m = std::max(m, lv[j]);
    }
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (m == neg_inf || !std::isfinite(m)) {
        return {lo, hi, m == neg_inf ? neg_inf : m, m == neg_inf ? neg_inf : m};
    }
    std::array<double, 21> f{};
    double k = 0.0, g = 0.0;
    for (std::size_t j = 0; j < 21; ++j) {
        f[j] = std::exp(lv[j] - m);
        k += rule.kronrod_weight[j] * f[j];
        g += rule.gauss_weight[j] * f[j];
    }
    // QUADPACK error heuristic, all quantities scaled by exp(m) / half.
    const double mean = 0.5 * k;
    double asc = 0.0;
    for (std::size_t j = 0; j < 21; ++j) asc += rule.kronrod_weight[j] * std::abs(f[j] - mean);
    double err = std::abs(k - g);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * k);
    const double scale = m + std::log(half);
    return {lo, hi, scale + std::log(k), scale + std::log(err)};
}

}  // namespace detail

// Integrates exp(log_f(x)) over [lo, hi] with interior breakpoints `breaks`
// (values outside (lo, hi) are ignored). Returns log of the integral.
// Endpoint singularities should be mapped away first (callers work in log
// coordinates); bisection toward an unbounded endpoint can evaluate it exactly.
template <class LogF>
LogIntegral integrate_log(const LogF& log_f, double lo, double hi, std::vector<double> breaks = {},
                          double rel_tol = 1e-13, int max_intervals = 4000) {
    using detail::Panel;
    std::vector<double> edges{lo};
    std::sort(breaks.begin(), breaks.end());
    for (double b : breaks)
        if (b > edges.back() && b < hi) edges.push_back(b);
    edges.push_back(hi);

    std::vector<Panel> panels;
    panels.reserve(64);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        panels.push_back(detail::eval_panel(log_f, edges[i], edges[i + 1]));

    auto by_error = [](const Panel& a, const Panel& b) { return a.log_error < b.log_error; };
    std::make_heap(panels.begin(), panels.end(), by_error);

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    LogIntegral out;
    for (;;) {
        double total = neg_inf, total_err = neg_inf;
        for (const auto& p : panels) {
            total = detail::log_add(total, p.log_value);
            total_err = detail::log_add(total_err, p.log_error);
        }
        out.log_value = total;
        out.rel_error = total == neg_inf ? 0.0 : std::exp(total_err - total);
        out.intervals = static_cast<int>(panels.size());
        if (total == neg_inf || out.rel_error <= rel_tol ||
            static_cast<int>(panels.size()) >= max_intervals)
            break;

        std::pop_heap(panels.begin(), panels.end(), by_error);
        const Panel worst = panels.back();
        panels.pop_back();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Panel cannot be split further in double precision.
            panels.push_back({worst.lo, worst.hi, worst.log_value, neg_inf});
            std::push_heap(panels.begin(), panels.end(), by_error);
            continue;
        }
        panels.push_back(detail::eval_panel(log_f, worst.lo, mid));
        std::push_heap(panels.begin(), panels.end(), by_error);
        panels.push_back(detail::eval_panel(log_f, mid, worst.hi));
        std::push_heap(panels.begin(), panels.end(), by_error);
    }
    return out;
}

// Batched variant: log_f(x, out) writes K log-integrands at x, sharing the
// node work across components. Panels are refined until every component meets
// rel_tol against its own total.
template <class LogFV>
std::vector<LogIntegral> integrate_log_batch(const LogFV& log_f, std::size_t K, double lo, double hi,
                                             std::vector<double> breaks = {}, double rel_tol = 1e-13,
                                             int max_intervals = 4000) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    const auto& rule = detail::kronrod21();
    std::vector<double> edges{lo};
    std::sort(breaks.begin(), breaks.end());
    for (double b : breaks)
        if (b > edges.back() && b < hi) edges.push_back(b);
    edges.push_back(hi);

    struct BPanel {
        double lo, hi;
        std::vector<double> val, err;  // per-component log value / log error
    };
    std::vector<double> lv(21 * K);
    // Running best panel value per component; a component whose panel bound
    // falls far below it is recorded as an upper bound without summation.
    std::vector<double> best(K, neg_inf);
    const double negligible = std::log(rel_tol) - 7.0;
    auto eval = [&](double a, double b) {
        BPanel p{a, b, std::vector<double>(K), std::vector<double>(K)};
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t j = 0; j < 21; ++j) log_f(mid + half * rule.node[j], &lv[j * K]);
        for (std::size_t k = 0; k < K; ++k) {
            double m = neg_inf;
            for (std::size_t j = 0; j < 21; ++j) m = std::max(m, lv[j * K + k]);
            if (!std::isfinite(m)) {
                p.val[k] = p.err[k] = m == neg_inf ? neg_inf : m;
                continue;
            }
            const double bound = m + std::log(2.0 * half);
            if (bound < best[k] + negligible) {
                p.val[k] = p.err[k] = bound;
                continue;
            }
            std::array<double, 21> f{};
            double kr = 0.0, g = 0.0;
            for (std::size_t j = 0; j < 21; ++j) {
                f[j] = std::exp(lv[j * K + k] - m);
                kr += rule.kronrod_weight[j] * f[j];
                g += rule.gauss_weight[j] * f[j];
            }
            const double mean = 0.5 * kr;
            double asc = 0.0;
            for (std::size_t j = 0; j < 21; ++j) asc += rule.kronrod_weight[j] * std::abs(f[j] - mean);
            double e = std::abs(kr - g);
            if (asc != 0.0 && e != 0.0) e = asc * std::min(1.0, std::pow(200.0 * e / asc, 1.5));
            e = std::max(e, 50.0 * std::numeric_limits<double>::epsilon() * kr);
            const double scale = m + std::log(half);
            p.val[k] = scale + std::log(kr);
            p.err[k] = scale + std::log(e);
            best[k] = std::max(best[k], p.val[k]);
        }
        return p;
    };

    std::vector<BPanel> panels;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) panels.push_back(eval(edges[i], edges[i + 1]));

    std::vector<LogIntegral> out(K);
    std::vector<double> tot(K), tot_err(K);
    auto log_sum = [&](std::size_t k, bool error) {
        double m = neg_inf;
        for (const auto& p : panels) m = std::max(m, error ? p.err[k] : p.val[k]);
        if (m == neg_inf) return m;
        double acc = 0.0;
        for (const auto& p : panels) acc += std::exp((error ? p.err[k] : p.val[k]) - m);
        return m + std::log(acc);
    };
    for (;;) {
        bool done = true;
        for (std::size_t k = 0; k < K; ++k) {
            tot[k] = log_sum(k, false);
            tot_err[k] = log_sum(k, true);
            out[k].log_value = tot[k];
            out[k].rel_error = tot[k] == neg_inf ? 0.0 : std::exp(tot_err[k] - tot[k]);
            out[k].intervals = static_cast<int>(panels.size());
            if (out[k].rel_error > rel_tol) done = false;
        }
        if (done || static_cast<int>(panels.size()) >= max_intervals) break;

        // Split every panel whose error exceeds its share of the budget for
        // some component, or the single worst panel if none does.
        const double share = std::log(rel_tol / static_cast<double>(panels.size()));
        std::vector<char> split(panels.size(), 0);
        std::size_t worst = 0;
        double worst_score = neg_inf;
        for (std::size_t i = 0; i < panels.size(); ++i)
            for (std::size_t k = 0; k < K; ++k) {
                if (tot[k] == neg_inf) continue;
                const double sc = panels[i].err[k] - tot[k];
                if (sc > share) split[i] = 1;
                if (sc > worst_score) {
                    worst_score = sc;
                    worst = i;
                }
            }
        split[worst] = 1;

        std::vector<BPanel> next;
        next.reserve(2 * panels.size());
        for (std::size_t i = 0; i < panels.size(); ++i) {
            BPanel& w = panels[i];
            const double mid = 0.5 * (w.lo + w.hi);
            if (!split[i]) {
                next.push_back(std::move(w));
            } else if (!(mid > w.lo && mid < w.hi)) {
                // Cannot be split further in double precision.
                std::fill(w.err.begin(), w.err.end(), neg_inf);
                next.push_back(std::move(w));
            } else {
                next.push_back(eval(w.lo, mid));
                next.push_back(eval(mid, w.hi));
            }
        }
        panels = std::move(next);
    }
    return out;
}

}  // namespace countshrink::quad
