#include "countshrink/quadrature.hpp"

#include <cstddef>

namespace countshrink::quad::detail {

namespace {

KronrodRule build_rule() {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& kx = gauss_kronrod<double, 21>::abscissa();  // 11 nonnegative nodes, kx[0] == 0
    const auto& kw = gauss_kronrod<double, 21>::weights();
    const auto& gx = gauss<double, 10>::abscissa();  // 5 positive nodes
    const auto& gw = gauss<double, 10>::weights();

    KronrodRule r;
    std::size_t j = 0;
    for (std::size_t i = 0; i < kx.size(); ++i) {
        double gweight = 0.0;
        for (std::size_t q = 0; q < gx.size(); ++q)
            if (std::abs(gx[q] - kx[i]) < 1e-14) gweight = gw[q];
        r.node[j] = kx[i];
        r.kronrod_weight[j] = kw[i];
        r.gauss_weight[j] = gweight;
        ++j;
        if (kx[i] != 0.0) {
            r.node[j] = -kx[i];
            r.kronrod_weight[j] = kw[i];
            r.gauss_weight[j] = gweight;
            ++j;
        }
    }
    return r;
}

}  // namespace

const KronrodRule& kronrod21() {
    static const KronrodRule rule = build_rule();
    return rule;
}

}  // namespace countshrink::quad::detail
