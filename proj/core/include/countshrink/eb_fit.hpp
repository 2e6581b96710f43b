#pragma once

// Empirical-Bayes estimation of (tau, gamma), optionally alpha, by maximising
// sum_i log m(y_i): a grid over (log tau, gamma) followed by Nelder-Mead.

#include <string>
#include <vector>

#include "countshrink/dataset.hpp"
#include "countshrink/gh_core.hpp"

namespace countshrink {

struct FitConfig {
    double tau_min = kMinTau;
    double tau_max = 1.0;
    double gamma_min = 0.0;
    double gamma_max = 20.0;
    int grid_points = 40;   // per axis; tau is log-spaced, gamma linear
    int refine_iters = 200;
    bool fit_alpha = false;
    double alpha = 0.5;     // pinned value, or starting value when fit_alpha
    double alpha_min = 0.05;
    double alpha_max = 20.0;
    unsigned threads = 1;   // grid evaluation workers (0 = default_threads())
    specfun::EvalControl ctl{};

    // Degenerate gamma range, i.e. gamma held fixed.
    static FitConfig fixed_gamma(double gamma);

    void validate() const;
};

struct TraceEntry {
    GHParams params;
    double objective;
};

struct FitResult {
    GHParams params;
    double log_marginal = 0.0;
    std::vector<TraceEntry> trace;
    std::vector<std::string> warnings;
};

// sum_j weight_j log m(value_j); -inf if any term fails to evaluate.
double log_marginal_likelihood(const DistinctCounts& counts, const GHParams& p,
                               const specfun::EvalControl& ctl = {});

FitResult fit(const CountDataset& counts, const FitConfig& cfg = {});

// Posterior summaries per observation, evaluated once per distinct count.
ShrinkageResult shrink(const CountDataset& counts, const GHParams& p,
                       const specfun::EvalControl& ctl = {});

}  // namespace countshrink
