#include "countshrink/eb_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "countshrink/optimize.hpp"
#include "countshrink/parallel.hpp"

namespace countshrink {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> log_grid(double lo, double hi, int k) {
    if (lo == hi) return {lo};
    std::vector<double> g(static_cast<std::size_t>(k));
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < k; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (k - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> lin_grid(double lo, double hi, int k) {
    if (lo == hi) return {lo};
    std::vector<double> g(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (k - 1);
    g.back() = hi;
    return g;
}

}  // namespace

FitConfig FitConfig::fixed_gamma(double gamma) {
    FitConfig c;
    c.gamma_min = c.gamma_max = gamma;
    return c;
}

void FitConfig::validate() const {
    if (!(tau_min >= kMinTau && tau_min <= tau_max && tau_max <= 1.0))
        throw std::invalid_argument("FitConfig: tau range must satisfy 1e-6 <= tau_min <= tau_max <= 1");
    if (!(gamma_min >= 0.0 && gamma_min <= gamma_max && std::isfinite(gamma_max)))
        throw std::invalid_argument("FitConfig: gamma range must satisfy 0 <= gamma_min <= gamma_max");
    if (grid_points < 2) throw std::invalid_argument("FitConfig: grid_points must be >= 2");
    if (refine_iters < 0) throw std::invalid_argument("FitConfig: refine_iters must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("FitConfig: alpha must be > 0");
    if (fit_alpha && !(alpha_min > 0.0 && alpha_min <= alpha && alpha <= alpha_max))
        throw std::invalid_argument("FitConfig: alpha must lie in [alpha_min, alpha_max]");
}

double log_marginal_likelihood(const DistinctCounts& counts, const GHParams& p,
                               const specfun::EvalControl& ctl) {
    try {
        const auto lm = marginal_log_pmf_batch(counts.values, p, ctl);
        double s = 0.0;
        for (std::size_t j = 0; j < lm.size(); ++j) s += counts.weights[j] * lm[j];
        return std::isnan(s) ? kNegInf : s;
    } catch (const NonConvergenceError&) {
        return kNegInf;
    }
}

FitResult fit(const CountDataset& counts, const FitConfig& cfg) {
    counts.validate();
    cfg.validate();
    const DistinctCounts dc = tabulate(counts.y);

    FitResult out;
    const auto taus = log_grid(cfg.tau_min, cfg.tau_max, cfg.grid_points);
    const auto gammas = lin_grid(cfg.gamma_min, cfg.gamma_max, cfg.grid_points);

    out.trace.resize(taus.size() * gammas.size());
    parallel_for(
        out.trace.size(),
        [&](std::size_t i) {
            GHParams p{cfg.alpha, gammas[i % gammas.size()], taus[i / gammas.size()]};
            out.trace[i] = {p, log_marginal_likelihood(dc, p, cfg.ctl)};
        },
        cfg.threads);

    auto best_of = [](const std::vector<TraceEntry>& t) {
        return std::max_element(t.begin(), t.end(), [](const TraceEntry& a, const TraceEntry& b) {
            return a.objective < b.objective;
        });
    };
    const TraceEntry grid_best = *best_of(out.trace);

    // Free coordinates: log tau, gamma, log alpha (each only if its range is open).
    const bool free_tau = cfg.tau_min < cfg.tau_max;
    const bool free_gamma = cfg.gamma_min < cfg.gamma_max;
    const bool free_alpha = cfg.fit_alpha && cfg.alpha_min < cfg.alpha_max;

    std::vector<double> x0, step;
    opt::Box box;
    auto add = [&](double x, double lo, double hi, double s) {
        x0.push_back(x);
        box.lo.push_back(lo);
        box.hi.push_back(hi);
        step.push_back(s);
    };
    if (free_tau) {
        const double lo = std::log(cfg.tau_min), hi = std::log(cfg.tau_max);
        add(std::log(grid_best.params.tau), lo, hi, (hi - lo) / (cfg.grid_points - 1));
    }
    if (free_gamma)
        add(grid_best.params.gamma, cfg.gamma_min, cfg.gamma_max,
            (cfg.gamma_max - cfg.gamma_min) / (cfg.grid_points - 1));
    if (free_alpha)
        add(std::log(cfg.alpha), std::log(cfg.alpha_min), std::log(cfg.alpha_max), 0.5);

    if (!x0.empty() && cfg.refine_iters > 0) {
        auto unpack = [&](const std::vector<double>& x) {
            GHParams p = grid_best.params;
            std::size_t k = 0;
            if (free_tau) p.tau = std::clamp(std::exp(x[k++]), cfg.tau_min, cfg.tau_max);
            if (free_gamma) p.gamma = x[k++];
            if (free_alpha) p.alpha = std::exp(x[k++]);
            return p;
        };
        auto objective = [&](const std::vector<double>& x) {
            const GHParams p = unpack(x);
            const double v = log_marginal_likelihood(dc, p, cfg.ctl);
            out.trace.push_back({p, v});
            return v;
        };
        opt::nelder_mead_max(objective, x0, step, box, cfg.refine_iters);
    }

    const TraceEntry best = *best_of(out.trace);
    out.params = best.params;
    out.log_marginal = best.objective;
    if (!std::isfinite(best.objective)) out.warnings.push_back("objective not finite at the optimum");
    if (free_gamma && out.params.gamma >= cfg.gamma_max)
        out.warnings.push_back("gamma estimate at upper search bound");
    if (free_tau && out.params.tau <= cfg.tau_min)
        out.warnings.push_back("tau estimate at lower search bound");
    return out;
}

ShrinkageResult shrink(const CountDataset& counts, const GHParams& p,
                       const specfun::EvalControl& ctl) {
    counts.validate();
    p.validate();
    const DistinctCounts dc = tabulate(counts.y);
    const auto log_k = log_posterior_kappa_mean_batch(dc.values, p, ctl);

    ShrinkageResult r;
    const std::size_t n = counts.size();
    r.kappa_mean.resize(n);
    r.theta_mean.resize(n);
    r.inclusion.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = dc.index[i];
        r.kappa_mean[i] = std::exp(log_k[j]);
        r.inclusion[i] = -std::expm1(log_k[j]);
        r.theta_mean[i] = r.inclusion[i] * (static_cast<double>(counts.y[i]) + p.alpha);
    }
    return r;
}

}  // namespace countshrink
