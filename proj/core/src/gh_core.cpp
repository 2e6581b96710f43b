#include "countshrink/gh_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace countshrink {

namespace {

using specfun::EvalControl;
using specfun::log_beta;
using specfun::log_gamma;

void require(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

// log 2F1(gamma, b; c; w) with w = -z, short-circuiting z = 0 and gamma = 0.
double log_f21_term(double gamma, double b, double c, double w, double one_plus_z,
                    const EvalControl& ctl) {
    if (w <= 0.0 || one_plus_z >= 1.0 || gamma == 0.0) return 0.0;
    return specfun::log_gauss_2f1_split(gamma, b, c, w, one_plus_z, ctl);
}

// log B(alpha + 1/2 + k, y + 1/2) + log 2F1(gamma, alpha + 1/2 + k; y + alpha + 1 + k; 1 - tau^2)
double log_posterior_norm(double k, double y, const GHParams& p, const EvalControl& ctl) {
    const double a = p.alpha + 0.5 + k;
    const double b = y + 0.5;
    return log_beta(a, b) + log_f21_term(p.gamma, a, a + b, p.w(), p.one_plus_z(), ctl);
}

// log B(alpha + 1/2 + k, y + 1/2) + log 2F1(...) for every y, batched over the 2F1 factor.
std::vector<double> log_posterior_norm_batch(double k, const std::vector<std::int64_t>& ys,
                                             const GHParams& p, const EvalControl& ctl) {
    const double a = p.alpha + 0.5 + k;
    std::vector<double> c(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        require(ys[i] >= 0, "marginal_log_pmf: y must be >= 0");
        c[i] = a + static_cast<double>(ys[i]) + 0.5;
    }
    std::vector<double> out(ys.size(), 0.0);
    const double w = p.w();
    if (!(w <= 0.0 || p.one_plus_z() >= 1.0 || p.gamma == 0.0))
        out = specfun::log_gauss_2f1_batch(p.gamma, a, c, w, p.one_plus_z(), ctl);
    for (std::size_t i = 0; i < ys.size(); ++i) out[i] += log_beta(a, c[i] - a);
    return out;
}

}  // namespace

void GHParams::validate() const {
    require(std::isfinite(alpha) && alpha > 0.0, "GHParams: alpha must be > 0");
    require(std::isfinite(gamma) && gamma >= 0.0, "GHParams: gamma must be >= 0");
    require(tau >= kMinTau && tau <= 1.0, "GHParams: tau must lie in [1e-6, 1]");
}

GHDistribution GHDistribution::make(double a, double b, double one_plus_z, double gamma,
                                    const EvalControl& ctl) {
    require(a > 0.0 && b > 0.0, "GHDistribution: a and b must be > 0");
    require(one_plus_z > 0.0 && one_plus_z <= 1.0, "GHDistribution: z must lie in (-1, 0]");
    require(gamma >= 0.0, "GHDistribution: gamma must be >= 0");
    GHDistribution d;
    d.a = a;
    d.b = b;
    d.one_plus_z = one_plus_z;
    d.z = one_plus_z - 1.0;
    d.gamma = gamma;
    d.log_norm = log_beta(a, b) + log_f21_term(gamma, a, a + b, 1.0 - one_plus_z, one_plus_z, ctl);
    return d;
}

double gh_log_density(double kappa, const GHDistribution& dist) {
    require(kappa > 0.0 && kappa < 1.0, "gh_log_density: kappa must lie in (0, 1)");
    // 1 + z kappa = (1 + z) kappa + (1 - kappa)
    const double third = dist.one_plus_z * kappa + (1.0 - kappa);
    return (dist.a - 1.0) * std::log(kappa) + (dist.b - 1.0) * std::log1p(-kappa) -
           dist.gamma * std::log(third) - dist.log_norm;
}

GHDistribution posterior_kappa_dist(std::int64_t y, const GHParams& p, const EvalControl& ctl) {
    require(y >= 0, "posterior_kappa_dist: y must be >= 0");
    p.validate();
    return GHDistribution::make(p.alpha + 0.5, static_cast<double>(y) + 0.5, p.one_plus_z(), p.gamma,
                                ctl);
}

double log_posterior_kappa_moment(double k, std::int64_t y, const GHParams& p,
                                  const EvalControl& ctl) {
    require(y >= 0, "posterior_kappa_moment: y must be >= 0");
    require(k >= 0.0, "posterior_kappa_moment: k must be >= 0");
    p.validate();
    if (k == 0.0) return 0.0;
    const double yd = static_cast<double>(y);
    return log_posterior_norm(k, yd, p, ctl) - log_posterior_norm(0.0, yd, p, ctl);
}

double posterior_kappa_moment(int k, std::int64_t y, const GHParams& p, const EvalControl& ctl) {
    if (k == 0) return 1.0;
    return std::exp(log_posterior_kappa_moment(static_cast<double>(k), y, p, ctl));
}

double posterior_theta_mean(std::int64_t y, const GHParams& p, const EvalControl& ctl) {
    // 1 - E(kappa) via expm1 keeps precision when E(kappa) is close to 1.
    const double inclusion = -std::expm1(log_posterior_kappa_moment(1.0, y, p, ctl));
    return inclusion * (static_cast<double>(y) + p.alpha);
}

double log_prior_norm(const GHParams& p, const EvalControl& ctl) {
    p.validate();
    return std::log(std::numbers::pi) + log_f21_term(p.gamma, 0.5, 1.0, p.w(), p.one_plus_z(), ctl);
}

double marginal_log_density(double y, const GHParams& p, const EvalControl& ctl) {
    require(std::isfinite(y) && y >= 0.0, "marginal_log_pmf: y must be >= 0");
    p.validate();
    return log_gamma(y + p.alpha) - log_gamma(p.alpha) - log_gamma(y + 1.0) +
           log_posterior_norm(0.0, y, p, ctl) - log_prior_norm(p, ctl);
}

std::vector<double> marginal_log_pmf_batch(const std::vector<std::int64_t>& ys, const GHParams& p,
                                           const EvalControl& ctl) {
    p.validate();
    if (ys.empty()) return {};
    auto out = log_posterior_norm_batch(0.0, ys, p, ctl);
    const double shared = log_gamma(p.alpha) + log_prior_norm(p, ctl);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double y = static_cast<double>(ys[i]);
        out[i] += log_gamma(y + p.alpha) - log_gamma(y + 1.0) - shared;
    }
    return out;
}

std::vector<double> log_posterior_kappa_mean_batch(const std::vector<std::int64_t>& ys,
                                               const GHParams& p, const EvalControl& ctl) {
    p.validate();
    if (ys.empty()) return {};
    const auto num = log_posterior_norm_batch(1.0, ys, p, ctl);
    const auto den = log_posterior_norm_batch(0.0, ys, p, ctl);
    std::vector<double> out(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) out[i] = num[i] - den[i];
    return out;
}

double marginal_log_pmf(std::int64_t y, const GHParams& p, const EvalControl& ctl) {
    require(y >= 0, "marginal_log_pmf: y must be >= 0");
    return marginal_log_density(static_cast<double>(y), p, ctl);
}

double log_prior_theta_density(double theta, double alpha) {
    require(std::isfinite(theta) && theta > 0.0, "prior_theta_density: theta must be > 0");
    require(std::isfinite(alpha) && alpha > 0.0, "prior_theta_density: alpha must be > 0");
    return -0.5 * std::log(std::numbers::pi) - log_beta(0.5, alpha) + theta +
           (alpha - 1.0) * std::log(theta) + specfun::log_upper_inc_gamma(0.5 - alpha, theta);
}

double prior_theta_density(double theta, double alpha) {
    return std::exp(log_prior_theta_density(theta, alpha));
}

DensityBounds prior_theta_bounds(double theta, double alpha) {
    require(std::isfinite(theta) && theta > 0.0, "prior_theta_bounds: theta must be > 0");
    constexpr double pi = std::numbers::pi;
    if (alpha == 0.5) {
        const double pref = std::pow(pi, -1.5) / std::sqrt(theta);
        return {0.5 * pref * std::log1p(2.0 / theta), pref * std::log1p(1.0 / theta)};
    }
    if (alpha == 1.0) {
        // (1/sqrt(pi)) (1/x - 2/(x + sqrt(x^2 + c))) = c / (sqrt(pi) x (x + sqrt(x^2 + c))^2)
        const double x = std::sqrt(theta);
        auto side = [x](double c) {
            const double s = x + std::sqrt(x * x + c);
            return c / (std::sqrt(pi) * x * s * s);
        };
        return {side(4.0 / pi), side(2.0)};
    }
    throw std::domain_error("prior_theta_bounds: alpha must be 0.5 or 1");
}

double tail_bound_upper(double eta, std::int64_t y, const GHParams& p) {
    require(eta > 0.0 && eta < 1.0, "tail_bound_upper: eta must lie in (0, 1)");
    p.validate();
    require(p.tau < 1.0, "tail_bound_upper: tau must be < 1");
    const double expo = static_cast<double>(y) - 0.5 - p.gamma;
    require(expo > 0.0, "tail_bound_upper: requires y > gamma + 1/2");
    const double t2 = p.tau * p.tau;
    const double e32 = std::pow(eta, 1.5);
    const double c_eta = (1.0 - e32) / e32;
    return c_eta / (1.0 - t2) * std::exp(-expo * std::log1p(t2 * eta / (1.0 - eta)));
}

double concentration_bound_lower(double eta, std::int64_t y, const GHParams& p) {
    require(eta > 0.0 && eta < 1.0, "concentration_bound_lower: eta must lie in (0, 1)");
    p.validate();
    const double d = p.gamma - 0.5 - static_cast<double>(y);
    require(d > 0.0, "concentration_bound_lower: requires y < gamma - 1/2");
    return std::exp(d * (2.0 * std::log(p.tau) - std::log1p(-eta)));
}

double type1_bound(double gamma, double alpha, double beta) {
    require(gamma >= 0.0 && alpha > 0.0 && beta > 0.0, "type1_bound: invalid parameters");
    const double g = gamma + 0.5;
    const double log_q = std::log(beta) - std::log1p(beta);
    return std::exp(g * log_q - (alpha - 1.0) * std::log1p(beta) - std::log(g) - log_beta(g, alpha));
}

double tweedie_log_theta_mean(std::int64_t y, const GHParams& p, const EvalControl& ctl) {
    require(y >= 1, "tweedie_log_theta_mean: y must be >= 1");
    const double yd = static_cast<double>(y);
    const double h = 1e-5 * std::max(1.0, yd);
    const double dl = (marginal_log_density(yd + h, p, ctl) - marginal_log_density(yd - h, p, ctl)) /
                      (2.0 * h);
    return specfun::digamma(yd + 1.0) + dl;
}

}  // namespace countshrink
