#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace countshrink {

// Observed counts with an optional constant exposure N (y_i ~ Poi(N theta_i)).
struct CountDataset {
    std::vector<std::int64_t> y;
    std::optional<double> exposure;
    std::vector<std::string> labels;  // empty, or one per observation

    static CountDataset from_counts(std::vector<std::int64_t> y);

    std::size_t size() const { return y.size(); }

    // Throws DataError on empty data, negative counts, bad exposure or label count.
    void validate() const;
};

// Counts collapsed to their distinct values; most likelihoods only need these.
struct DistinctCounts {
    std::vector<std::int64_t> values;  // increasing
    std::vector<double> weights;       // multiplicity of each value
    std::vector<std::size_t> index;    // observation -> position in values

    std::size_t n() const { return index.size(); }
};

DistinctCounts tabulate(const std::vector<std::int64_t>& y);

}  // namespace countshrink
