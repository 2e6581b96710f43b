#pragma once

// Gauss-hypergeometric (GH) shrinkage prior for Poisson rates.
//
// Hierarchy: y ~ Poi(theta), theta | kappa ~ Ga(alpha, scale (1 - kappa) / kappa),
// kappa ~ GH(1/2, 1/2, z = tau^2 - 1, gamma). The posterior of kappa given y is
// GH(alpha + 1/2, y + 1/2, z, gamma), so E(theta | y) = (1 - E(kappa | y)) (y + alpha).

#include <cstdint>
#include <utility>
#include <vector>

#include "countshrink/specfun.hpp"

namespace countshrink {

inline constexpr double kMinTau = 1e-6;

struct GHParams {
    double alpha = 0.5;  // shape of the gamma layer
    double gamma = 1.0;  // thresholding exponent
    double tau = 1.0;    // global shrinkage, in [kMinTau, 1]

    double z() const { return tau * tau - 1.0; }
    // 1 + z = tau^2, kept separately so tiny tau does not lose precision.
    double one_plus_z() const { return tau * tau; }
    // -z = 1 - tau^2, the 2F1 argument, formed without cancellation near tau = 1.
    double w() const { return (1.0 - tau) * (1.0 + tau); }

    // Throws std::domain_error when an invariant is violated.
    void validate() const;
};

// GH(kappa | a, b, z, gamma) = C kappa^(a-1) (1-kappa)^(b-1) (1 + z kappa)^(-gamma),
// log C^-1 = log B(a, b) + log 2F1(gamma, a; a + b; -z).
struct GHDistribution {
    double a = 1.0;
    double b = 1.0;
    double z = 0.0;           // in (-1, 0]
    double one_plus_z = 1.0;  // 1 + z, stored exactly
    double gamma = 0.0;
    double log_norm = 0.0;    // log C^-1

    static GHDistribution make(double a, double b, double one_plus_z, double gamma,
                               const specfun::EvalControl& ctl = {});
};

struct ShrinkageResult {
    std::vector<double> kappa_mean;  // E(kappa | y)
    std::vector<double> theta_mean;  // (1 - E(kappa | y)) (y + alpha)
    std::vector<double> inclusion;   // 1 - E(kappa | y)

    std::size_t size() const { return kappa_mean.size(); }
};

double gh_log_density(double kappa, const GHDistribution& dist);

GHDistribution posterior_kappa_dist(std::int64_t y, const GHParams& p,
                                    const specfun::EvalControl& ctl = {});

// log E(kappa^k | y) for real k >= 0; the building block for the moments.
double log_posterior_kappa_moment(double k, std::int64_t y, const GHParams& p,
                                  const specfun::EvalControl& ctl = {});

double posterior_kappa_moment(int k, std::int64_t y, const GHParams& p,
                              const specfun::EvalControl& ctl = {});

double posterior_theta_mean(std::int64_t y, const GHParams& p,
                            const specfun::EvalControl& ctl = {});

// log m(y), the GH marginal pmf of a count.
double marginal_log_pmf(std::int64_t y, const GHParams& p, const specfun::EvalControl& ctl = {});

// log m(y) for every entry of ys, sharing one quadrature pass across them.
std::vector<double> marginal_log_pmf_batch(const std::vector<std::int64_t>& ys, const GHParams& p,
                                           const specfun::EvalControl& ctl = {});

// log E(kappa | y) for every entry of ys (batched log_posterior_kappa_moment(1, ...)).
std::vector<double> log_posterior_kappa_mean_batch(const std::vector<std::int64_t>& ys,
                                               const GHParams& p,
                                               const specfun::EvalControl& ctl = {});

// log m(y) continued to real y >= 0 (factorials replaced by Gamma functions).
double marginal_log_density(double y, const GHParams& p, const specfun::EvalControl& ctl = {});

// log of the prior normaliser B(1/2, 1/2) 2F1(gamma, 1/2; 1; -z), shared by every y.
double log_prior_norm(const GHParams& p, const specfun::EvalControl& ctl = {});

// Marginal prior density of theta at tau = 1:
//   p(theta) = e^theta theta^(alpha-1) Gamma(1/2 - alpha, theta) / (sqrt(pi) B(1/2, alpha)).
double prior_theta_density(double theta, double alpha);
double log_prior_theta_density(double theta, double alpha);

struct DensityBounds {
    double lower;
    double upper;
};

// Closed-form sandwich on prior_theta_density for alpha in {1/2, 1}.
DensityBounds prior_theta_bounds(double theta, double alpha);

// Upper bound on pr(kappa > eta | y) for y > gamma + 1/2 and tau < 1:
//   C(eta) / (1 - tau^2) * (1 + tau^2 eta / (1 - eta))^-(y - 1/2 - gamma),
//   C(eta) = (1 - eta^1.5) / eta^1.5.
double tail_bound_upper(double eta, std::int64_t y, const GHParams& p);

// Upper bound on pr(kappa < eta | y) for y < gamma - 1/2: (tau^2 / (1 - eta))^d,
// d = gamma - 1/2 - y.
double concentration_bound_lower(double eta, std::int64_t y, const GHParams& p);

// Type-I error bound for the thresholding rule under a Ga(alpha, beta) null
// (beta is the gamma scale):
//   (beta/(1+beta))^(gamma+1/2) (1/(1+beta))^(alpha-1) / ((gamma+1/2) B(gamma+1/2, alpha)).
double type1_bound(double gamma, double alpha, double beta);

// Tweedie posterior mean of log(theta): digamma(y + 1) + d/dy log m(y), with the
// derivative taken by central differences on the Gamma-continued marginal.
double tweedie_log_theta_mean(std::int64_t y, const GHParams& p,
                              const specfun::EvalControl& ctl = {});

}  // namespace countshrink
