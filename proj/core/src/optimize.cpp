#include "countshrink/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace countshrink::opt {

std::vector<double> Box::clamp(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
}

NMResult nelder_mead_max(const Objective& f, std::vector<double> x0, std::vector<double> step,
                         const Box& box, int max_iters, double ftol) {
    const std::size_t d = x0.size();
    if (d == 0 || step.size() != d || box.lo.size() != d || box.hi.size() != d)
        throw std::invalid_argument("nelder_mead_max: dimension mismatch");

    NMResult out;
    auto eval = [&](const std::vector<double>& x) {
        ++out.evaluations;
        const double v = f(x);
        return std::isnan(v) ? -INFINITY : v;
    };

    std::vector<std::vector<double>> pts{box.clamp(x0)};
    for (std::size_t i = 0; i < d; ++i) {
        auto p = pts[0];
        p[i] += step[i];
        if (p[i] > box.hi[i]) p[i] = pts[0][i] - step[i];
        pts.push_back(box.clamp(p));
    }
    std::vector<double> val(d + 1);
    for (std::size_t i = 0; i <= d; ++i) val[i] = eval(pts[i]);

    std::vector<std::size_t> order(d + 1);
    auto affine = [&](const std::vector<double>& c, const std::vector<double>& p, double t) {
        std::vector<double> r(d);
        for (std::size_t k = 0; k < d; ++k) r[k] = c[k] + t * (p[k] - c[k]);
        return box.clamp(std::move(r));
    };

    for (out.iterations = 0; out.iterations < max_iters; ++out.iterations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
        if (std::isfinite(val[worst]) && val[best] - val[worst] <= ftol) break;

        std::vector<double> c(d, 0.0);
        for (std::size_t i : order)
            if (i != worst)
                for (std::size_t k = 0; k < d; ++k) c[k] += pts[i][k] / static_cast<double>(d);

        const auto xr = affine(c, pts[worst], -1.0);
        const double fr = eval(xr);
        if (fr > val[best]) {
            const auto xe = affine(c, pts[worst], -2.0);
            const double fe = eval(xe);
            if (fe > fr) {
                pts[worst] = xe;
                val[worst] = fe;
            } else {
                pts[worst] = xr;
                val[worst] = fr;
            }
            continue;
        }
        if (fr > val[second]) {
            pts[worst] = xr;
            val[worst] = fr;
            continue;
        }
        const bool outside = fr > val[worst];
        const auto xc = affine(c, outside ? xr : pts[worst], 0.5);
        const double fc = eval(xc);
        if (fc > std::max(fr, val[worst])) {
            pts[worst] = xc;
            val[worst] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) continue;
            pts[i] = affine(pts[best], pts[i], 0.5);
            val[i] = eval(pts[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::max_element(val.begin(), val.end()) - val.begin());
    out.x = pts[best];
    out.value = val[best];
    return out;
}

Max1D brent_max(const std::function<double(double)>& f, double lo, double hi, int bits,
                int max_iters) {
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iters);
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi,
                                                         bits, iters);
    return {r.first, -r.second};
}

}  // namespace countshrink::opt
