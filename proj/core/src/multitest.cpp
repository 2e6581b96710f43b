#include "countshrink/multitest.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "countshrink/errors.hpp"

namespace countshrink {

TwoMeans two_means_threshold(const std::vector<double>& weights) {
    if (weights.size() < 2) throw std::invalid_argument("two_means_threshold: need at least 2 weights");
    std::vector<double> w = weights;
    std::sort(w.begin(), w.end());
    if (w.front() == w.back()) throw DegenerateClusteringError();

    const std::size_t n = w.size();
    std::vector<double> s(n + 1, 0.0), ss(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s[i + 1] = s[i] + w[i];
        ss[i + 1] = ss[i] + w[i] * w[i];
    }
    auto sse = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
        const double k = static_cast<double>(hi - lo);
        const double sum = s[hi] - s[lo];
        return std::max(0.0, (ss[hi] - ss[lo]) - sum * sum / k);
    };

    TwoMeans best{};
    best.sse = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n; ++k) {
        if (w[k - 1] == w[k]) continue;  // equal values belong to the same cluster
        const double v = sse(0, k) + sse(k, n);
        if (v < best.sse) {
            best.sse = v;
            best.n_low = k;
        }
    }
    best.low = s[best.n_low] / static_cast<double>(best.n_low);
    best.high = (s[n] - s[best.n_low]) / static_cast<double>(n - best.n_low);
    best.xi = 0.5 * (best.low + best.high);
    return best;
}

TestDecision decide_weights(const std::vector<double>& weights, bool allow_fallback) {
    TestDecision d;
    try {
        const TwoMeans tm = two_means_threshold(weights);
        d.xi = tm.xi;
        d.centers = {tm.low, tm.high};
    } catch (const DegenerateClusteringError&) {
        if (!allow_fallback) throw;
        d.xi = 0.5;
        d.centers = {weights.front(), weights.front()};
        d.fallback = true;
    }
    d.reject.resize(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        d.reject[i] = weights[i] > d.xi;
        d.n_rejected += d.reject[i] ? 1 : 0;
    }
    return d;
}

TestDecision decide(const ShrinkageResult& shrinkage, bool allow_fallback) {
    return decide_weights(shrinkage.inclusion, allow_fallback);
}

TestDecision kw_decide(const NPMLESolution& sol, const CountDataset& counts, bool allow_fallback) {
    const DistinctCounts dc = tabulate(counts.y);
    std::vector<double> per(dc.values.size());
    bool clipped = false;
    for (std::size_t j = 0; j < per.size(); ++j) {
        const double v = kw_weight(sol, dc.values[j]);
        per[j] = std::clamp(v, 0.0, 1.0);
        clipped = clipped || per[j] != v;
    }
    std::vector<double> w(counts.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = per[dc.index[i]];
    TestDecision d = decide_weights(w, allow_fallback);
    d.clipped = clipped;
    return d;
}

ConfusionCounts confusion(const TestDecision& decision, const std::vector<bool>& truth) {
    if (decision.reject.size() != truth.size())
        throw std::invalid_argument("confusion: decision and truth lengths differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool r = decision.reject[i];
        if (r && truth[i]) ++c.tp;
        else if (r) ++c.fp;
        else if (truth[i]) ++c.fn;
        else ++c.tn;
    }
    return c;
}

}  // namespace countshrink
