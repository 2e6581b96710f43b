#include "countshrink/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "countshrink/eb_fit.hpp"
#include "countshrink/estimators.hpp"
#include "countshrink/multitest.hpp"
#include "countshrink/parallel.hpp"

namespace countshrink {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) { return format_double(x); }

// Short form for human-readable check lines; data tables keep full precision.
std::string brief(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string label_of(const CountDataset& d, std::size_t i) {
    return d.labels.empty() ? std::to_string(i + 1) : d.labels[i];
}

void echo_fit(RunRecord& r, const FitCommandOptions& o) {
    r.config.emplace_back("alpha", fmt(o.alpha));
    r.config.emplace_back("gamma", o.gamma ? fmt(*o.gamma) : "fit");
    r.config.emplace_back("gamma_max", fmt(o.gamma_max));
    r.config.emplace_back("tau_min", fmt(o.tau_min));
}

// |value - target| <= band
BandCheck band(const std::string& name, double value, double target, double band) {
    const bool ok = std::isfinite(value) && std::abs(value - target) <= band;
    return {name, ok, brief(value) + " vs " + brief(target) + " +/- " + brief(band)};
}

}  // namespace

FitConfig FitCommandOptions::fit_config() const {
    FitConfig c;
    c.alpha = alpha;
    c.tau_min = tau_min;
    if (gamma) {
        c.gamma_min = c.gamma_max = *gamma;
    } else {
        c.gamma_max = gamma_max;
    }
    c.threads = threads;
    return c;
}

RunRecord cmd_fit(const CountDataset& data, const FitCommandOptions& opts) {
    const auto t0 = Clock::now();
    data.validate();
    const auto res = gh_estimate(data, opts.fit_config());

    RunRecord r;
    r.command = "fit";
    echo_fit(r, opts);
    r.config.emplace_back("tau_hat", fmt(res.fit.params.tau));
    r.config.emplace_back("gamma_hat", fmt(res.fit.params.gamma));
    r.config.emplace_back("log_marginal", fmt(res.fit.log_marginal));
    if (data.exposure) r.config.emplace_back("exposure", fmt(*data.exposure));
    r.warnings = res.fit.warnings;

    Table t;
    t.columns = {"label", "y", "kappa_mean", "theta_mean", "inclusion"};
    if (data.exposure) t.columns.push_back("rate");
    const auto& s = res.shrinkage;
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<std::string> row{label_of(data, i), std::to_string(data.y[i]), fmt(s.kappa_mean[i]),
                                     fmt(s.theta_mean[i]), fmt(s.inclusion[i])};
        if (data.exposure) row.push_back(fmt(s.theta_mean[i] / *data.exposure));
        t.rows.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
    r.elapsed_seconds = seconds_since(t0);
    return r;
}

RunRecord cmd_test(const CountDataset& data, const std::string& method, const FitCommandOptions& opts) {
    const auto t0 = Clock::now();
    data.validate();
    RunRecord r;
    r.command = "test";
    r.config.emplace_back("method", method);
    echo_fit(r, opts);

    std::vector<double> weights;
    TestDecision d;
    if (method == "gh" || method == "hs") {
        const auto res = method == "gh" ? gh_estimate(data, opts.fit_config())
                                        : horseshoe(data, opts.fit_config());
        r.config.emplace_back("tau_hat", fmt(res.fit.params.tau));
        r.config.emplace_back("gamma_hat", fmt(res.fit.params.gamma));
        r.warnings = res.fit.warnings;
        weights = res.shrinkage.inclusion;
        d = decide(res.shrinkage, true);
    } else if (method == "kw") {
        const auto sol = kw_npmle(data);
        if (!sol.converged) r.warnings.push_back("NPMLE EM stopped at max_iters");
        for (auto y : data.y) weights.push_back(std::clamp(kw_weight(sol, y), 0.0, 1.0));
        d = kw_decide(sol, data, true);
        if (d.clipped) r.warnings.push_back("KW weights clipped to [0, 1] for clustering");
    } else {
        throw std::invalid_argument("unknown test method '" + method + "' (expected gh, hs or kw)");
    }
    if (d.fallback) r.warnings.push_back("degenerate clustering: all weights equal, xi = 0.5 used");
    r.config.emplace_back("xi", fmt(d.xi));
    r.config.emplace_back("center_low", fmt(d.centers.first));
    r.config.emplace_back("center_high", fmt(d.centers.second));
    r.config.emplace_back("n_rejected", std::to_string(d.n_rejected));

    Table t;
    t.columns = {"label", "y", "weight", "reject"};
    for (std::size_t i = 0; i < data.size(); ++i)
        t.rows.push_back({label_of(data, i), std::to_string(data.y[i]), fmt(weights[i]), d.reject[i] ? "1" : "0"});
    r.tables.push_back(std::move(t));
    r.elapsed_seconds = seconds_since(t0);
    return r;
}

bool SimulateOutcome::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BandCheck& c) { return c.pass; });
}

std::vector<BandCheck> check_table1(const std::vector<Table1Cell>& cells) {
    std::vector<BandCheck> out;
    auto find = [](const Table1Cell& c, const std::string& m) -> const RiskReport* {
        for (const auto& r : c.reports)
            if (r.method == m) return &r;
        return nullptr;
    };
    for (const auto& c : cells) {
        const auto* gh = find(c, "GH");
        if (!gh) continue;
        const std::string cell = "n=" + std::to_string(c.n) + " omega=" + brief(c.omega);
        if (c.n == 200 && std::abs(c.omega - 0.1) < 1e-9)
            out.push_back(band("GH ABR " + cell, gh->abr_mean, 8.2, std::max(0.6, 0.15 * 8.2)));
        if (c.n == 500 && std::abs(c.omega - 0.2) < 1e-9)
            out.push_back(band("GH ABR " + cell, gh->abr_mean, 13.1, std::max(0.35, 0.15 * 13.1)));
        for (const char* other : {"Naive", "Global"})
            if (const auto* o = find(c, other))
                out.push_back({std::string("GH < ") + other + " " + cell, gh->abr_mean < o->abr_mean,
                               brief(gh->abr_mean) + " vs " + brief(o->abr_mean)});
    }
    return out;
}

std::vector<BandCheck> check_table2(const std::vector<Table2Row>& rows) {
    std::vector<BandCheck> out;
    for (const auto& row : rows) {
        const double gh = row.reports[0].mean, tpb = row.reports[1].mean, kw = row.reports[2].mean;
        const std::string cell = "omega=" + brief(row.omega);
        if (std::abs(row.omega - 0.1) < 1e-9) out.push_back(band("GH errors " + cell, gh, 1.7, 0.5));
        if (std::abs(row.omega - 0.3) < 1e-9) out.push_back(band("GH errors " + cell, gh, 5.9, 1.0));
        out.push_back({"GH <= TPB " + cell, gh <= tpb, brief(gh) + " vs " + brief(tpb)});
        out.push_back({"GH <= KW " + cell, gh <= kw, brief(gh) + " vs " + brief(kw)});
    }
    return out;
}

std::vector<BandCheck> check_type1(const std::vector<Type1Row>& rows) {
    std::vector<BandCheck> out;
    for (const auto& r : rows)
        out.push_back({"type-I rate <= bound gamma=" + brief(r.gamma), r.empirical <= r.bound,
                       brief(r.empirical) + " vs " + brief(r.bound)});
    return out;
}

SimulateOutcome cmd_simulate(const std::string& suite, const SimulateOptions& opts) {
    const auto t0 = Clock::now();
    SimulateOutcome out;
    RunRecord& r = out.record;
    r.command = "simulate";
    r.config.emplace_back("suite", suite);
    r.config.emplace_back("seed", std::to_string(opts.seed));

    SimOptions so;
    so.replications = opts.reps;
    so.seed = opts.seed;
    so.threads = opts.threads;

    if (suite == "table1") {
        r.config.emplace_back("reps", std::to_string(opts.reps));
        r.config.emplace_back("loss_scale", fmt(so.loss_scale));
        const auto cells = run_table1(table1_methods(), {200, 500}, {0.1, 0.15, 0.2}, so);
        Table summary{"", {"n", "omega", "method", "abr_mean", "abr_sd", "failures"}, {}};
        Table reps{"reps", {"n", "omega", "method", "rep", "loss"}, {}};
        for (const auto& c : cells)
            for (const auto& rep : c.reports) {
                summary.rows.push_back({std::to_string(c.n), fmt(c.omega), rep.method, fmt(rep.abr_mean),
                                        fmt(rep.abr_sd), std::to_string(rep.failures)});
                for (std::size_t k = 0; k < rep.per_rep_losses.size(); ++k)
                    reps.rows.push_back({std::to_string(c.n), fmt(c.omega), rep.method, std::to_string(k),
                                         fmt(rep.per_rep_losses[k])});
            }
        r.tables = {std::move(summary), std::move(reps)};
        out.checks = check_table1(cells);
    } else if (suite == "table2") {
        r.config.emplace_back("reps", std::to_string(opts.reps));
        r.config.emplace_back("n", "200");
        r.config.emplace_back("contamination_p", "0.1");
        const auto rows = run_table2(table2_omegas(), 200, 0.1, so);
        Table summary{"", {"omega", "method", "mean_errors", "sd_errors", "fallbacks"}, {}};
        for (const auto& row : rows)
            for (const auto& e : row.reports)
                summary.rows.push_back({fmt(row.omega), e.method, fmt(e.mean), fmt(e.sd), std::to_string(e.fallbacks)});
        r.tables = {std::move(summary)};
        out.checks = check_table2(rows);
    } else if (suite == "type1") {
        TwoGroupsParams tg;
        tg.alpha0 = 0.5;
        tg.beta0 = 0.1;
        Type1Options to;
        to.seed = opts.seed;
        r.config.emplace_back("alpha0", fmt(tg.alpha0));
        r.config.emplace_back("beta0", fmt(tg.beta0));
        r.config.emplace_back("tau", fmt(to.tau));
        r.config.emplace_back("xi", fmt(to.xi));
        r.config.emplace_back("draws", std::to_string(to.draws));
        const auto rows = run_type1_check(tg, {1.0, 2.0, 5.0}, to);
        Table summary{"", {"gamma", "empirical", "bound", "draws", "rejections"}, {}};
        for (const auto& x : rows)
            summary.rows.push_back({fmt(x.gamma), fmt(x.empirical), fmt(x.bound), std::to_string(x.draws),
                                    std::to_string(x.rejections)});
        r.tables = {std::move(summary)};
        out.checks = check_type1(rows);
    } else {
        throw std::invalid_argument("unknown suite '" + suite + "' (expected table1, table2 or type1)");
    }
    for (const auto& c : out.checks)
        if (!c.pass) r.warnings.push_back("band violated: " + c.name + " (" + c.detail + ")");
    r.elapsed_seconds = seconds_since(t0);
    return out;
}

RunRecord cmd_bench(std::size_t reps) {
    RunRecord r;
    r.command = "bench";
    r.config.emplace_back("reps", std::to_string(reps));
    Table t{"", {"kernel", "seconds_per_call"}, {}};
    auto time = [&](const std::string& name, auto&& fn) {
        const auto t0 = Clock::now();
        for (std::size_t i = 0; i < reps; ++i) fn(i);
        t.rows.push_back({name, fmt(seconds_since(t0) / static_cast<double>(std::max<std::size_t>(reps, 1)))});
    };
    volatile double sink = 0.0;
    time("gauss_2f1_series", [&](std::size_t i) { sink = sink + specfun::gauss_2f1(1.0, 1.5, 4.0 + i % 7, 0.4); });
    time("gauss_2f1_quadrature", [&](std::size_t i) { sink = sink + specfun::log_gauss_2f1(1.0, 1.5, 4.0 + i % 7, 0.99); });
    SimConfig sc;
    const auto data = CountDataset::from_counts(gen_sparse_t3(sc, 0).y);
    const auto fc = SimOptions::simulation_fit_config();
    time("eb_fit_n200", [&](std::size_t) { sink = sink + fit(data, fc).log_marginal; });
    time("kw_npmle_n200", [&](std::size_t) { sink = sink + kw_npmle(data).loglik; });
    r.tables.push_back(std::move(t));
    return r;
}

}  // namespace countshrink
