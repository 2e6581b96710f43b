#include "countshrink/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "countshrink/quadrature.hpp"

namespace countshrink::specfun {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

// log sum_k (a)_k (b)_k / (c)_k w^k / k!  for 0 <= w <= 0.5.
double log_series_2f1(double a, double b, double c, double w, const EvalControl& ctl) {
    if (a == 0.0 || w == 0.0) return 0.0;
    double term = 1.0, sum = 1.0, log_scale = 0.0;
    for (int k = 0; k < ctl.max_terms; ++k) {
        const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * w;
        term *= ratio;
        sum += term;
        if (sum > 1e280) {
            term *= 1e-280;
            sum *= 1e-280;
            log_scale += 280.0 * std::numbers::ln10;
        }
        // Remaining terms shrink at least geometrically with ratio max(current, w).
        const double r = std::max(ratio, w);
        if (r < 1.0 && term * r / (1.0 - r) <= ctl.rel_tol * sum) return log_scale + std::log(sum);
    }
    throw NonConvergenceError("gauss_2f1: series did not converge within max_terms=" +
                              std::to_string(ctl.max_terms));
}

// log of the Euler integral
//   int_0^1 t^(b-1) (1-t)^(d-1) (wc + w (1-t))^(-a) dt,   wc = 1 - w,
// evaluated in logarithmic coordinates on both halves of (0, 1): t = e^-v on
// the left and 1 - t = e^-v on the right, v >= ln 2. Both transformed
// integrands are analytic with O(1)-wide features and exponential decay in v.
// The halves are laid side by side on one axis x (x > 0 left, x < 0 right) so
// a single adaptive pass refines only panels that matter for the total.
double log_euler_integral(double a, double b, double d, double w, double wc,
                          const EvalControl& ctl) {
    const double ln2 = std::numbers::ln2;
    const double log_wc = std::log(wc);

    auto left = [=](double v) {
        const double log_t = -v;
        const double t = std::exp(log_t);
        // log1p keeps log(1 - t) accurate at small t, where (d - 1) amplifies any rounding.
        return b * log_t + (d - 1.0) * std::log1p(-t) - a * std::log(wc + w * (1.0 - t));
    };
    auto right = [=](double v) {
        const double log_u = -v;
        const double u = std::exp(log_u);
        return d * log_u + (b - 1.0) * std::log1p(-u) - a * std::log(wc + w * u);
    };
    auto integrand = [&](double x) { return x >= 0.0 ? left(ln2 + x) : right(ln2 - x); };

    // Left: mode of t^b (1-t)^(d-1) sits near v = log((d-1)/b); decay rate b beyond it.
    const double left_peak = std::max(0.0, std::log(std::max(d - 1.0, 1.0) / b) - ln2);
    const double left_end = left_peak + 46.0 / b + 2.0;
    // Right: knee of (wc + w u) at u = wc / w; decay rate d beyond it.
    const double knee = std::max(0.0, std::log(w) - log_wc - ln2);
    const double right_end = knee + 46.0 / d + 2.0;

    const auto r = quad::integrate_log(integrand, -right_end, left_end,
                                       {0.0, left_peak, -knee, -knee - 1.0 / d}, ctl.rel_tol);
    if (r.rel_error > 1e3 * ctl.rel_tol)
        throw NonConvergenceError("gauss_2f1: quadrature did not reach tolerance");
    return r.log_value;
}

std::vector<double> log_euler_integral_batch(double a, double b, const std::vector<double>& d,
                                             double w, double wc, const EvalControl& ctl) {
    const double ln2 = std::numbers::ln2;
    const double d_min = *std::min_element(d.begin(), d.end());
    const double d_max = *std::max_element(d.begin(), d.end());
    const std::size_t K = d.size();

    auto integrand = [&](double x, double* out) {
        if (x >= 0.0) {
            const double log_t = -(ln2 + x);
            const double t = std::exp(log_t);
            const double base = b * log_t - a * std::log(wc + w * (1.0 - t));
            const double l1 = std::log1p(-t);
            for (std::size_t k = 0; k < K; ++k) out[k] = base + (d[k] - 1.0) * l1;
        } else {
            const double log_u = -(ln2 - x);
            const double u = std::exp(log_u);
            const double base = (b - 1.0) * std::log1p(-u) - a * std::log(wc + w * u);
            for (std::size_t k = 0; k < K; ++k) out[k] = base + d[k] * log_u;
        }
    };

    std::vector<double> breaks{0.0};
    double last_peak = -1.0;
    std::vector<double> peaks;
    for (double dk : d) peaks.push_back(std::max(0.0, std::log(std::max(dk - 1.0, 1.0) / b) - ln2));
    std::sort(peaks.begin(), peaks.end());
    for (double pk : peaks)
        if (pk - last_peak >= 1.0) {
            breaks.push_back(pk);
            last_peak = pk;
        }
    const double left_end = peaks.back() + 46.0 / b + 2.0;
    const double knee = std::max(0.0, std::log(w) - std::log(wc) - ln2);
    const double right_end = knee + 46.0 / d_min + 2.0;
    breaks.push_back(-knee);
    breaks.push_back(-knee - 1.0 / d_max);
    breaks.push_back(-knee - 1.0 / d_min);

    const auto r = quad::integrate_log_batch(integrand, K, -right_end, left_end, breaks, ctl.rel_tol);
    std::vector<double> out(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (r[k].rel_error > 1e3 * ctl.rel_tol)
            throw NonConvergenceError("gauss_2f1: quadrature did not reach tolerance");
        out[k] = r[k].log_value;
    }
    return out;
}

void check_2f1_args(double a, double b, double c, double w) {
    require(std::isfinite(a) && a >= 0.0, "gauss_2f1: requires a >= 0");
    require(std::isfinite(b) && b > 0.0, "gauss_2f1: requires b > 0");
    require(std::isfinite(c) && c > b, "gauss_2f1: requires c > b");
    require(w >= 0.0 && w < 1.0, "gauss_2f1: requires 0 <= w < 1");
}

// Gamma(s, x) for s in (0, 1] and 0 < x < 1.5, written so that s -> 0 is smooth:
//   Gamma(s, x) = (Gamma(1+s) - 1)/s - expm1(s ln x)/s - sum_{n>=1} (-1)^n x^(s+n) / (n! (s+n)).
double small_x_series(double s, double x) {
    const double lx = std::log(x);
    double head;
    if (s == 0.0) {
        head = -std::numbers::egamma - lx;
    } else {
        head = boost::math::tgamma1pm1(s) / s - std::expm1(s * lx) / s;
    }
    const double xs = s == 0.0 ? 1.0 : std::exp(s * lx);
    double sum = 0.0, pw = 1.0;  // pw = (-x)^n / n!
    for (int n = 1; n < 200; ++n) {
        pw *= -x / n;
        const double t = pw / (s + n);
        sum += t;
        if (std::abs(t) < 1e-17 * std::abs(sum)) break;
    }
    return head - xs * sum;
}

// log Gamma(s, x) by Legendre's continued fraction (modified Lentz); x >= 1.5.
double log_cf_upper(double s, double x) {
    constexpr double tiny = 1e-300;
    double bb = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / bb;
    double h = d;
    for (int i = 1; i < 10'000; ++i) {
        const double an = -i * (i - s);
        bb += 2.0;
        d = an * d + bb;
        if (std::abs(d) < tiny) d = tiny;
        c = bb + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return -x + s * std::log(x) + std::log(h);
    }
    throw NonConvergenceError("upper_inc_gamma: continued fraction did not converge");
}

}  // namespace

double log_gamma(double x) {
    require(x > 0.0, "log_gamma: requires x > 0");
    return boost::math::lgamma(x);
}

double log_beta(double a, double b) {
    require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b),
            "log_beta: requires a > 0 and b > 0");
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (hi > 10.0 && lo < 0.1 * hi) {
        // Gamma(hi) / Gamma(hi + lo) directly avoids cancelling two large lgammas.
        const double ratio = boost::math::tgamma_delta_ratio(hi, lo);
        if (ratio > 1e-300 && std::isfinite(ratio)) return boost::math::lgamma(lo) + std::log(ratio);
    }
    return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

double log_gauss_2f1_split(double a, double b, double c, double w, double one_minus_w,
                           const EvalControl& ctl) {
    check_2f1_args(a, b, c, w);
    require(one_minus_w > 0.0 && one_minus_w <= 1.0, "gauss_2f1: requires 0 < 1 - w <= 1");
    require(ctl.rel_tol > 0.0 && ctl.max_terms >= 1, "gauss_2f1: invalid EvalControl");
    if (a == 0.0 || w == 0.0) return 0.0;
    if (w <= 0.5) return log_series_2f1(a, b, c, w, ctl);
    return log_euler_integral(a, b, c - b, w, one_minus_w, ctl) - log_beta(b, c - b);
}

std::vector<double> log_gauss_2f1_batch(double a, double b, const std::vector<double>& c, double w,
                                        double one_minus_w, const EvalControl& ctl) {
    std::vector<double> out(c.size(), 0.0);
    if (c.empty()) return out;
    for (double ck : c) check_2f1_args(a, b, ck, w);
    require(one_minus_w > 0.0 && one_minus_w <= 1.0, "gauss_2f1: requires 0 < 1 - w <= 1");
    require(ctl.rel_tol > 0.0 && ctl.max_terms >= 1, "gauss_2f1: invalid EvalControl");
    if (a == 0.0 || w == 0.0) return out;
    if (w <= 0.5) {
        for (std::size_t k = 0; k < c.size(); ++k) out[k] = log_series_2f1(a, b, c[k], w, ctl);
        return out;
    }
    std::vector<double> d(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) d[k] = c[k] - b;
    out = log_euler_integral_batch(a, b, d, w, one_minus_w, ctl);
    for (std::size_t k = 0; k < c.size(); ++k) out[k] -= log_beta(b, d[k]);
    return out;
}

double log_gauss_2f1(double a, double b, double c, double w, const EvalControl& ctl) {
    return log_gauss_2f1_split(a, b, c, w, 1.0 - w, ctl);
}

double gauss_2f1(double a, double b, double c, double w, const EvalControl& ctl) {
    return std::exp(log_gauss_2f1(a, b, c, w, ctl));
}

double log_upper_inc_gamma(double s, double x) {
    require(std::isfinite(x) && x > 0.0, "upper_inc_gamma: requires x > 0");
    require(std::isfinite(s) && s <= 1.0, "upper_inc_gamma: requires s <= 1");
    if (s == 1.0) return -x;
    if (x >= 1.5) return log_cf_upper(s, x);
    if (s >= 0.0) return std::log(small_x_series(s, x));

    // Negative shape: start at s0 = s + n in [0, 1) and recur downward,
    // Gamma(s, x) = (Gamma(s + 1, x) - x^s e^-x) / s.
    const double s0 = s + std::ceil(-s);
    double g = small_x_series(s0, x);
    for (double sk = s0 - 1.0; sk >= s - 1e-12; sk -= 1.0) {
        g = (g - std::exp(sk * std::log(x) - x)) / sk;
    }
    return std::log(g);
}

double upper_inc_gamma(double s, double x) {
    return std::exp(log_upper_inc_gamma(s, x));
}

double exp_e1(double x) {
    require(std::isfinite(x) && x > 0.0, "exp_e1: requires x > 0");
    return upper_inc_gamma(0.0, x);
}

double digamma(double x) {
    require(std::isfinite(x) && x > 0.0, "digamma: requires x > 0");
    return boost::math::digamma(x);
}

}  // namespace countshrink::specfun
