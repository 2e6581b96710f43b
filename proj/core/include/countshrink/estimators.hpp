#pragma once

// Comparator estimators for sparse Poisson means.

#include <cstdint>
#include <vector>

#include "countshrink/dataset.hpp"
#include "countshrink/eb_fit.hpp"
#include "countshrink/gh_core.hpp"

namespace countshrink {

// Robbins frequency ratio (y + 1) #{y + 1} / #{y}; zero when no (y + 1) is observed.
std::vector<double> robbins(const CountDataset& counts);

struct NPMLESolution {
    std::vector<double> support;  // increasing atoms
    std::vector<double> mass;
    double loglik = 0.0;
    int iters = 0;
    bool converged = false;
    bool monotone = true;             // every EM step kept loglik nondecreasing
    std::vector<double> loglik_trace;  // loglik after each iteration, starting from the uniform init
};

struct NPMLEConfig {
    int grid_size = 400;
    double tol = 1e-9;  // relative loglik change
    int max_iters = 5000;
};

// Default atoms: geometric from 1e-3 to 1 for half the grid, linear from there
// to max(y) + 3 sqrt(max(y)).
std::vector<double> npmle_grid(std::int64_t max_y, int grid_size);

NPMLESolution kw_npmle(const CountDataset& counts, const NPMLEConfig& cfg = {});

// EM on an explicit set of atoms.
NPMLESolution kw_npmle_on(const CountDataset& counts, std::vector<double> support, double tol,
                          int max_iters);

// log P_G(y) = log sum_g Poi(y | theta_g) mass_g.
double npmle_log_marginal(const NPMLESolution& sol, std::int64_t y);

// E(theta | y) under G-hat. Sets *underflow (if given) when P_G(y) underflows; returns 0 then.
double kw_posterior_mean(const NPMLESolution& sol, std::int64_t y, bool* underflow = nullptr);

// P_G(y + 1) / P_G(y), with no (y + 1) factor.
double kw_weight(const NPMLESolution& sol, std::int64_t y, bool* underflow = nullptr);

std::vector<double> kw_estimates(const NPMLESolution& sol, const CountDataset& counts);

// Negative-binomial (gamma-Poisson) fit: theta ~ Ga(shape a, rate b).
struct GammaPriorFit {
    double a = 1.0;
    double b = 1.0;
    double loglik = 0.0;
    bool fallback = false;  // method-of-moments with a dispersion floor was used
};

struct GlobalGammaResult {
    GammaPriorFit prior;
    std::vector<double> estimates;  // (y + a) / (1 + b)
};

// Weighted NB marginal-likelihood fit over distinct values; b is profiled out
// (b = a sum w / sum w y) and a found by a 1-D search.
GammaPriorFit fit_gamma_prior(const std::vector<std::int64_t>& values,
                              const std::vector<double>& weights);

GlobalGammaResult global_gamma(const CountDataset& counts);

struct ZipResult {
    double pi = 0.0;  // structural-zero probability
    GammaPriorFit prior;
    std::vector<double> estimates;
    int iters = 0;
    bool pi_at_bound = false;
};

ZipResult zip_bayes(const CountDataset& counts);

struct EBShrinkage {
    FitResult fit;
    ShrinkageResult shrinkage;
};

// GH pipeline: fit (tau, gamma) by marginal likelihood, then shrink.
EBShrinkage gh_estimate(const CountDataset& counts, const FitConfig& cfg = {});

// Horseshoe = GH with gamma pinned at 1; only tau is estimated.
EBShrinkage horseshoe(const CountDataset& counts, FitConfig cfg = {});

// theta ~ (1 - p) Ga(alpha0, scale beta0) + p Ga(alpha0, scale beta0 + delta).
struct TwoGroupsParams {
    double omega_prior = 0.1;
    double alpha0 = 1.0;
    double beta0 = 0.1;
    double delta = 10.0;

    void validate() const;
};

// Posterior probability that y came from the alternative component.
double two_groups_inclusion(std::int64_t y, const TwoGroupsParams& tg);

// omega* with E(theta | y) = omega* (y + alpha0).
double two_groups_weight(std::int64_t y, const TwoGroupsParams& tg);

}  // namespace countshrink
