#include "countshrink/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "countshrink/multitest.hpp"
#include "countshrink/parallel.hpp"
#include "countshrink/rng.hpp"

namespace countshrink {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum StreamTag : std::uint64_t { kTagT3 = 1, kTagZip = 2, kTagTwoGroups = 3 };

}  // namespace

void SimConfig::validate() const {
    if (n < 1) throw std::invalid_argument("SimConfig: n must be >= 1");
    if (!(omega >= 0.0 && omega <= 1.0)) throw std::invalid_argument("SimConfig: omega must lie in [0, 1]");
    if (replications < 1) throw std::invalid_argument("SimConfig: replications must be >= 1");
    if (!(contamination_p >= 0.0 && contamination_p < 1.0))
        throw std::invalid_argument("SimConfig: contamination_p must lie in [0, 1)");
}

SparseSample gen_sparse_t3(const SimConfig& cfg, std::uint64_t rep, std::uint64_t cell) {
    cfg.validate();
    RngStream rng(cfg.seed, cell, rep, kTagT3);
    SparseSample s;
    s.theta.resize(cfg.n);
    s.y.resize(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        s.theta[i] = rng.bernoulli(cfg.omega) ? std::abs(rng.student_t(3.0)) : 0.0;
        s.y[i] = rng.poisson(s.theta[i]);
    }
    return s;
}

LabelledSample gen_contaminated_zip(const SimConfig& cfg, std::uint64_t rep, std::uint64_t cell) {
    cfg.validate();
    RngStream rng(cfg.seed, cell, rep, kTagZip);
    LabelledSample s;
    s.truth.resize(cfg.n);
    s.y.resize(cfg.n);
    std::vector<std::size_t> null_zeros;
    for (std::size_t i = 0; i < cfg.n; ++i) {
        s.truth[i] = rng.bernoulli(cfg.omega);
        s.y[i] = s.truth[i] ? rng.poisson(cfg.poisson_mean) : 0;
        if (!s.truth[i]) null_zeros.push_back(i);
    }
    const auto m = static_cast<std::size_t>(std::llround(cfg.contamination_p * static_cast<double>(null_zeros.size())));
    // Partial Fisher-Yates: the first m slots become a uniform m-subset.
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.below(null_zeros.size() - k));
        std::swap(null_zeros[k], null_zeros[j]);
        s.y[null_zeros[k]] = 1;
    }
    return s;
}

SparseSample gen_two_groups_null(const SimConfig& cfg, std::uint64_t rep, std::uint64_t cell) {
    cfg.validate();
    cfg.tg.validate();
    RngStream rng(cfg.seed, cell, rep, kTagTwoGroups);
    SparseSample s;
    s.theta.resize(cfg.n);
    s.y.resize(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        s.theta[i] = rng.gamma(cfg.tg.alpha0, cfg.tg.beta0);
        s.y[i] = rng.poisson(s.theta[i]);
    }
    return s;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::HS: return "HS";
        case Method::KW: return "KW";
        case Method::GH: return "GH";
        case Method::Robbins: return "Robbins";
        case Method::Global: return "Global";
        case Method::ZIP: return "ZIP";
        case Method::Naive: return "Naive";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (Method m : table1_methods()) {
        std::string a = method_name(m), b = name;
        std::transform(a.begin(), a.end(), a.begin(), ::tolower);
        std::transform(b.begin(), b.end(), b.begin(), ::tolower);
        if (a == b) return m;
    }
    throw std::invalid_argument("unknown method '" + name + "'");
}

const std::vector<Method>& table1_methods() {
    static const std::vector<Method> m{Method::HS,     Method::KW,  Method::GH,   Method::Robbins,
                                       Method::Global, Method::ZIP, Method::Naive};
    return m;
}

FitConfig SimOptions::simulation_fit_config() {
    FitConfig c;
    c.grid_points = 12;
    c.refine_iters = 100;
    c.threads = 1;
    return c;
}

std::vector<double> estimate(Method m, const CountDataset& data, const SimOptions& opt) {
    switch (m) {
        case Method::HS: return horseshoe(data, opt.fit).shrinkage.theta_mean;
        case Method::GH: return gh_estimate(data, opt.fit).shrinkage.theta_mean;
        case Method::KW: return kw_estimates(kw_npmle(data, opt.npmle), data);
        case Method::Robbins: return robbins(data);
        case Method::Global: return global_gamma(data).estimates;
        case Method::ZIP: return zip_bayes(data).estimates;
        case Method::Naive: {
            std::vector<double> e(data.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<double>(data.y[i]);
            return e;
        }
    }
    throw std::logic_error("estimate: unhandled method");
}

std::pair<double, double> mean_sd(const std::vector<double>& v) {
    double s = 0.0;
    std::size_t k = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            s += x;
            ++k;
        }
    if (k == 0) return {kNaN, kNaN};
    const double mean = s / static_cast<double>(k);
    double ss = 0.0;
    for (double x : v)
        if (std::isfinite(x)) ss += (x - mean) * (x - mean);
    return {mean, k > 1 ? std::sqrt(ss / static_cast<double>(k - 1)) : 0.0};
}

std::vector<Table1Cell> run_table1(const std::vector<Method>& methods, const std::vector<std::size_t>& ns,
                                   const std::vector<double>& omegas, const SimOptions& opt) {
    std::vector<Table1Cell> cells;
    std::uint64_t cell_id = 0;
    for (std::size_t n : ns)
        for (double omega : omegas) {
            SimConfig cfg;
            cfg.n = n;
            cfg.omega = omega;
            cfg.replications = opt.replications;
            cfg.seed = opt.seed;
            cfg.validate();

            const std::size_t R = opt.replications, M = methods.size();
            std::vector<double> loss(R * M, kNaN);
            parallel_for(
                R,
                [&](std::size_t rep) {
                    const auto sample = gen_sparse_t3(cfg, rep, cell_id);
                    const auto data = CountDataset::from_counts(sample.y);
                    for (std::size_t k = 0; k < M; ++k) {
                        try {
                            const auto est = estimate(methods[k], data, opt);
                            double s = 0.0;
                            for (std::size_t i = 0; i < n; ++i)
                                s += (est[i] - sample.theta[i]) * (est[i] - sample.theta[i]);
                            loss[rep * M + k] = opt.loss_scale * s / static_cast<double>(n);
                        } catch (const std::exception&) {
                            loss[rep * M + k] = kNaN;
                        }
                    }
                },
                opt.threads);

            Table1Cell cell{n, omega, {}};
            for (std::size_t k = 0; k < M; ++k) {
                RiskReport r;
                r.method = method_name(methods[k]);
                r.per_rep_losses.resize(R);
                for (std::size_t rep = 0; rep < R; ++rep) {
                    r.per_rep_losses[rep] = loss[rep * M + k];
                    if (!std::isfinite(r.per_rep_losses[rep])) ++r.failures;
                }
                std::tie(r.abr_mean, r.abr_sd) = mean_sd(r.per_rep_losses);
                cell.reports.push_back(std::move(r));
            }
            cells.push_back(std::move(cell));
            ++cell_id;
        }
    return cells;
}

std::vector<double> table2_omegas() {
    std::vector<double> w(10);
    for (int i = 0; i < 10; ++i) w[static_cast<std::size_t>(i)] = 0.1 + 0.2 * i / 9.0;
    w.back() = 0.3;
    return w;
}

std::vector<Table2Row> run_table2(const std::vector<double>& omegas, std::size_t n, double contamination_p,
                                  const SimOptions& opt) {
    static const char* names[] = {"GH", "TPB", "KW"};
    constexpr std::size_t M = 3;
    std::vector<Table2Row> rows;
    std::uint64_t cell_id = 0;
    for (double omega : omegas) {
        SimConfig cfg;
        cfg.n = n;
        cfg.omega = omega;
        cfg.contamination_p = contamination_p;
        cfg.replications = opt.replications;
        cfg.seed = opt.seed;
        cfg.signal = Signal::poisson4;
        cfg.validate();

        const std::size_t R = opt.replications;
        std::vector<double> errors(R * M, kNaN);
        std::vector<char> fell_back(R * M, 0);
        parallel_for(
            R,
            [&](std::size_t rep) {
                const auto sample = gen_contaminated_zip(cfg, rep, cell_id);
                const auto data = CountDataset::from_counts(sample.y);
                for (std::size_t k = 0; k < M; ++k) {
                    try {
                        TestDecision d;
                        if (k == 0) d = decide(gh_estimate(data, opt.fit).shrinkage, true);
                        if (k == 1) d = decide(horseshoe(data, opt.fit).shrinkage, true);
                        if (k == 2) d = kw_decide(kw_npmle(data, opt.npmle), data, true);
                        errors[rep * M + k] = static_cast<double>(confusion(d, sample.truth).misclassified());
                        fell_back[rep * M + k] = d.fallback ? 1 : 0;
                    } catch (const std::exception&) {
                        errors[rep * M + k] = kNaN;
                    }
                }
            },
            opt.threads);

        Table2Row row{omega, {}};
        for (std::size_t k = 0; k < M; ++k) {
            ErrorReport r;
            r.method = names[k];
            r.per_rep.resize(R);
            for (std::size_t rep = 0; rep < R; ++rep) {
                r.per_rep[rep] = errors[rep * M + k];
                r.fallbacks += fell_back[rep * M + k] ? 1 : 0;
            }
            std::tie(r.mean, r.sd) = mean_sd(r.per_rep);
            row.reports.push_back(std::move(r));
        }
        rows.push_back(std::move(row));
        ++cell_id;
    }
    return rows;
}

std::vector<Type1Row> run_type1_check(const TwoGroupsParams& tg, const std::vector<double>& gammas,
                                      const Type1Options& opt) {
    tg.validate();
    SimConfig cfg;
    cfg.n = opt.draws;
    cfg.seed = opt.seed;
    cfg.tg = tg;
    cfg.signal = Signal::two_groups;
    const auto sample = gen_two_groups_null(cfg, 0, 0);
    const DistinctCounts dc = tabulate(sample.y);

    std::vector<Type1Row> rows;
    for (double g : gammas) {
        const GHParams p{tg.alpha0, g, opt.tau};
        const auto log_k = log_posterior_kappa_mean_batch(dc.values, p);
        double rejected = 0.0;
        for (std::size_t j = 0; j < dc.values.size(); ++j)
            if (-std::expm1(log_k[j]) > opt.xi) rejected += dc.weights[j];
        Type1Row r;
        r.gamma = g;
        r.draws = opt.draws;
        r.rejections = static_cast<std::size_t>(rejected);
        r.empirical = rejected / static_cast<double>(opt.draws);
        r.bound = type1_bound(g, tg.alpha0, tg.beta0);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace countshrink
