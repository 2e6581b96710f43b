#include "countshrink/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "countshrink/errors.hpp"

namespace countshrink {

CountDataset CountDataset::from_counts(std::vector<std::int64_t> y) {
    CountDataset d;
    d.y = std::move(y);
    return d;
}

void CountDataset::validate() const {
    if (y.empty()) throw DataError("dataset is empty");
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] < 0) throw DataError("negative count at observation " + std::to_string(i + 1));
    if (exposure && !(std::isfinite(*exposure) && *exposure > 0.0))
        throw DataError("exposure must be a positive finite constant");
    if (!labels.empty() && labels.size() != y.size())
        throw DataError("label count does not match observation count");
}

DistinctCounts tabulate(const std::vector<std::int64_t>& y) {
    DistinctCounts d;
    d.values = y;
    std::sort(d.values.begin(), d.values.end());
    d.values.erase(std::unique(d.values.begin(), d.values.end()), d.values.end());
    d.weights.assign(d.values.size(), 0.0);
    d.index.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto it = std::lower_bound(d.values.begin(), d.values.end(), y[i]);
        const auto j = static_cast<std::size_t>(it - d.values.begin());
        d.index[i] = j;
        d.weights[j] += 1.0;
    }
    return d;
}

}  // namespace countshrink
