#include "countshrink/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "countshrink/optimize.hpp"
#include "countshrink/specfun.hpp"

namespace countshrink {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_poisson(std::int64_t y, double theta) {
    const double yd = static_cast<double>(y);
    if (theta <= 0.0) return y == 0 ? 0.0 : kNegInf;
    return yd * std::log(theta) - theta - std::lgamma(yd + 1.0);
}

double log_sum_exp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// NB log pmf with gamma shape a and rate b.
double log_nb_rate(std::int64_t y, double a, double b) {
    const double yd = static_cast<double>(y);
    return std::lgamma(yd + a) - std::lgamma(a) - std::lgamma(yd + 1.0) + a * std::log(b / (1.0 + b)) -
           yd * std::log1p(b);
}

// NB log pmf with gamma shape a and scale s.
double log_nb_scale(std::int64_t y, double a, double s) {
    const double yd = static_cast<double>(y);
    return std::lgamma(yd + a) - std::lgamma(a) - std::lgamma(yd + 1.0) + yd * (std::log(s) - std::log1p(s)) -
           a * std::log1p(s);
}

constexpr double kZeroMeanRate = 1e12;
constexpr double kPiFloor = 1e-6;

}  // namespace

std::vector<double> robbins(const CountDataset& counts) {
    counts.validate();
    std::map<std::int64_t, double> freq;
    for (auto y : counts.y) freq[y] += 1.0;
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto y = counts.y[i];
        const auto it = freq.find(y + 1);
        out[i] = it == freq.end() ? 0.0 : static_cast<double>(y + 1) * it->second / freq[y];
    }
    return out;
}

std::vector<double> npmle_grid(std::int64_t max_y, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("npmle_grid: grid_size must be >= 2");
    const double my = static_cast<double>(std::max<std::int64_t>(max_y, 0));
    const double top = std::max(1.0, my + 3.0 * std::sqrt(my));
    const double lo = 1e-3;
    const int n_geo = std::max(2, grid_size / 2);
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(grid_size));
    const double geo_hi = std::min(1.0, top);
    for (int i = 0; i < n_geo; ++i) g.push_back(lo * std::pow(geo_hi / lo, static_cast<double>(i) / (n_geo - 1)));
    const int n_lin = grid_size - n_geo;
    for (int i = 1; i <= n_lin; ++i) g.push_back(geo_hi + (top - geo_hi) * i / n_lin);
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

NPMLESolution kw_npmle(const CountDataset& counts, const NPMLEConfig& cfg) {
    counts.validate();
    const auto max_y = *std::max_element(counts.y.begin(), counts.y.end());
    return kw_npmle_on(counts, npmle_grid(max_y, cfg.grid_size), cfg.tol, cfg.max_iters);
}

NPMLESolution kw_npmle_on(const CountDataset& counts, std::vector<double> support, double tol,
                          int max_iters) {
    counts.validate();
    if (support.size() < 2) throw std::invalid_argument("kw_npmle: need at least two atoms");
    if (!(tol > 0.0)) throw std::invalid_argument("kw_npmle: tol must be > 0");
    std::sort(support.begin(), support.end());

    const DistinctCounts dc = tabulate(counts.y);
    const std::size_t J = dc.values.size(), G = support.size();
    const double n = static_cast<double>(dc.n());

    // Row-scaled likelihood matrix: lik[j][g] = Poi(y_j | theta_g) / max_g Poi(y_j | theta_g).
    std::vector<double> lik(J * G), row_max(J);
    for (std::size_t j = 0; j < J; ++j) {
        double m = kNegInf;
        for (std::size_t g = 0; g < G; ++g) {
            lik[j * G + g] = log_poisson(dc.values[j], support[g]);
            m = std::max(m, lik[j * G + g]);
        }
        row_max[j] = m;
        for (std::size_t g = 0; g < G; ++g) lik[j * G + g] = std::exp(lik[j * G + g] - m);
    }

    NPMLESolution sol;
    sol.support = support;
    sol.mass.assign(G, 1.0 / static_cast<double>(G));
    std::vector<double> f(J), acc(G);

    auto loglik = [&] {
        double ll = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            double s = 0.0;
            for (std::size_t g = 0; g < G; ++g) s += lik[j * G + g] * sol.mass[g];
            f[j] = s;
            ll += dc.weights[j] * (std::log(s) + row_max[j]);
        }
        return ll;
    };

    double ll = loglik();
    sol.loglik_trace.push_back(ll);
    for (sol.iters = 0; sol.iters < max_iters;) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t j = 0; j < J; ++j) {
            const double c = dc.weights[j] / (n * f[j]);
            for (std::size_t g = 0; g < G; ++g) acc[g] += c * lik[j * G + g];
        }
        double total = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            sol.mass[g] *= acc[g];
            total += sol.mass[g];
        }
        for (auto& m : sol.mass) m /= total;
        ++sol.iters;

        const double next = loglik();
        sol.loglik_trace.push_back(next);
        if (next < ll - 1e-12 * std::max(1.0, std::abs(ll))) sol.monotone = false;
        const double change = std::abs(next - ll);
        ll = next;
        if (change <= tol * std::max(1.0, std::abs(ll))) {
            sol.converged = true;
            break;
        }
    }
    sol.loglik = ll;
    return sol;
}

double npmle_log_marginal(const NPMLESolution& sol, std::int64_t y) {
    std::vector<double> t(sol.support.size());
    for (std::size_t g = 0; g < t.size(); ++g)
        t[g] = sol.mass[g] > 0.0 ? std::log(sol.mass[g]) + log_poisson(y, sol.support[g]) : kNegInf;
    return log_sum_exp(t);
}

double kw_posterior_mean(const NPMLESolution& sol, std::int64_t y, bool* underflow) {
    if (y < 0) throw std::domain_error("kw_posterior_mean: y must be >= 0");
    const double den = npmle_log_marginal(sol, y);
    if (underflow) *underflow = den == kNegInf;
    if (den == kNegInf) return 0.0;
    std::vector<double> t(sol.support.size());
    for (std::size_t g = 0; g < t.size(); ++g)
        t[g] = sol.mass[g] > 0.0 && sol.support[g] > 0.0
                   ? std::log(sol.support[g]) + std::log(sol.mass[g]) + log_poisson(y, sol.support[g])
                   : kNegInf;
    return std::exp(log_sum_exp(t) - den);
}

double kw_weight(const NPMLESolution& sol, std::int64_t y, bool* underflow) {
    if (y < 0) throw std::domain_error("kw_weight: y must be >= 0");
    const double den = npmle_log_marginal(sol, y);
    if (underflow) *underflow = den == kNegInf;
    if (den == kNegInf) return 0.0;
    return std::exp(npmle_log_marginal(sol, y + 1) - den);
}

std::vector<double> kw_estimates(const NPMLESolution& sol, const CountDataset& counts) {
    const DistinctCounts dc = tabulate(counts.y);
    std::vector<double> per(dc.values.size());
    for (std::size_t j = 0; j < per.size(); ++j) per[j] = kw_posterior_mean(sol, dc.values[j]);
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = per[dc.index[i]];
    return out;
}

GammaPriorFit fit_gamma_prior(const std::vector<std::int64_t>& values,
                              const std::vector<double>& weights) {
    double W = 0.0, S = 0.0, SS = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double y = static_cast<double>(values[j]);
        W += weights[j];
        S += weights[j] * y;
        SS += weights[j] * y * y;
    }
    if (!(W > 0.0)) throw std::invalid_argument("fit_gamma_prior: no weight");
    const double mean = S / W;
    const double var = std::max(0.0, SS / W - mean * mean);

    auto loglik = [&](double a, double b) {
        double ll = 0.0;
        for (std::size_t j = 0; j < values.size(); ++j)
            if (weights[j] > 0.0) ll += weights[j] * log_nb_rate(values[j], a, b);
        return ll;
    };

    GammaPriorFit fit;
    if (mean <= 0.0) {
        // All weight on zero: the prior collapses onto theta = 0.
        fit.a = 1.0;
        fit.b = kZeroMeanRate;
        fit.fallback = true;
        fit.loglik = loglik(fit.a, fit.b);
        return fit;
    }
    constexpr double log_a_lo = -9.21, log_a_hi = 9.21;  // a in [1e-4, 1e4]
    if (var > mean) {
        auto profile = [&](double log_a) {
            const double a = std::exp(log_a);
            return loglik(a, a / mean);
        };
        const auto best = opt::brent_max(profile, log_a_lo, log_a_hi);
        if (best.x < log_a_hi - 1e-3) {
            fit.a = std::exp(best.x);
            fit.b = fit.a / mean;
            fit.loglik = best.value;
            return fit;
        }
    }
    // No detectable overdispersion: moments with an excess-variance floor.
    const double excess = std::max(var - mean, 1e-2 * mean);
    fit.a = mean * mean / excess;
    fit.b = mean / excess;
    fit.fallback = true;
    fit.loglik = loglik(fit.a, fit.b);
    return fit;
}

GlobalGammaResult global_gamma(const CountDataset& counts) {
    counts.validate();
    const DistinctCounts dc = tabulate(counts.y);
    GlobalGammaResult r;
    r.prior = fit_gamma_prior(dc.values, dc.weights);
    r.estimates.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        r.estimates[i] = (static_cast<double>(counts.y[i]) + r.prior.a) / (1.0 + r.prior.b);
    return r;
}

ZipResult zip_bayes(const CountDataset& counts) {
    counts.validate();
    const DistinctCounts dc = tabulate(counts.y);
    const double n = static_cast<double>(dc.n());
    const bool has_zero = dc.values.front() == 0;
    const double n0 = has_zero ? dc.weights.front() : 0.0;

    ZipResult r;
    if (!has_zero) {
        r.pi = kPiFloor;
        r.pi_at_bound = true;
        r.prior = fit_gamma_prior(dc.values, dc.weights);
    } else if (n0 == n) {
        r.pi = 1.0 - kPiFloor;
        r.pi_at_bound = true;
        r.prior = fit_gamma_prior(dc.values, dc.weights);
    } else {
        r.prior = fit_gamma_prior(dc.values, dc.weights);
        r.pi = std::clamp(0.5 * n0 / n, kPiFloor, 1.0 - kPiFloor);
        std::vector<double> w = dc.weights;
        double ll_old = kNegInf;
        for (r.iters = 0; r.iters < 500; ++r.iters) {
            const double p0 = std::exp(log_nb_rate(0, r.prior.a, r.prior.b));
            const double z = r.pi / (r.pi + (1.0 - r.pi) * p0);
            r.pi = std::clamp(z * n0 / n, kPiFloor, 1.0 - kPiFloor);
            w.front() = n0 * (1.0 - z);
            r.prior = fit_gamma_prior(dc.values, w);

            const double p0n = std::exp(log_nb_rate(0, r.prior.a, r.prior.b));
            double ll = n0 * std::log(r.pi + (1.0 - r.pi) * p0n);
            for (std::size_t j = 1; j < dc.values.size(); ++j)
                ll += dc.weights[j] * (std::log1p(-r.pi) + log_nb_rate(dc.values[j], r.prior.a, r.prior.b));
            if (std::abs(ll - ll_old) <= 1e-10 * std::max(1.0, std::abs(ll))) break;
            ll_old = ll;
        }
        r.pi_at_bound = r.pi <= kPiFloor || r.pi >= 1.0 - kPiFloor;
    }

    const double mean0 = r.prior.a / (1.0 + r.prior.b);
    const double p0 = std::exp(log_nb_rate(0, r.prior.a, r.prior.b));
    const double not_structural = (1.0 - r.pi) * p0 / (r.pi + (1.0 - r.pi) * p0);
    r.estimates.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto y = counts.y[i];
        r.estimates[i] = y > 0 ? (static_cast<double>(y) + r.prior.a) / (1.0 + r.prior.b)
                               : not_structural * mean0;
    }
    return r;
}

EBShrinkage gh_estimate(const CountDataset& counts, const FitConfig& cfg) {
    EBShrinkage r;
    r.fit = fit(counts, cfg);
    r.shrinkage = shrink(counts, r.fit.params, cfg.ctl);
    return r;
}

EBShrinkage horseshoe(const CountDataset& counts, FitConfig cfg) {
    cfg.gamma_min = cfg.gamma_max = 1.0;
    return gh_estimate(counts, cfg);
}

void TwoGroupsParams::validate() const {
    if (!(omega_prior > 0.0 && omega_prior < 1.0 && alpha0 > 0.0 && beta0 > 0.0 && delta >= 0.0))
        throw std::domain_error("TwoGroupsParams: invalid parameters");
}

double two_groups_inclusion(std::int64_t y, const TwoGroupsParams& tg) {
    tg.validate();
    if (y < 0) throw std::domain_error("two_groups_inclusion: y must be >= 0");
    const double l0 = std::log1p(-tg.omega_prior) + log_nb_scale(y, tg.alpha0, tg.beta0);
    const double l1 = std::log(tg.omega_prior) + log_nb_scale(y, tg.alpha0, tg.beta0 + tg.delta);
    return 1.0 / (1.0 + std::exp(l0 - l1));
}

double two_groups_weight(std::int64_t y, const TwoGroupsParams& tg) {
    const double om = two_groups_inclusion(y, tg);
    const double b = tg.beta0, bd = tg.beta0 + tg.delta;
    return (1.0 - om) * b / (1.0 + b) + om * bd / (1.0 + bd);
}

}  // namespace countshrink
