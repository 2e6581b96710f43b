#pragma once

// Thresholding of shrinkage weights by exact two-means clustering.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "countshrink/dataset.hpp"
#include "countshrink/estimators.hpp"
#include "countshrink/gh_core.hpp"

namespace countshrink {

struct TwoMeans {
    double xi;     // midpoint of the two cluster means
    double low;    // mean of the lower cluster
    double high;   // mean of the upper cluster
    double sse;    // within-cluster sum of squares of the split
    std::size_t n_low;
};

// Globally optimal 1-D two-means by scanning every split of the sorted weights.
// Throws DegenerateClusteringError when all weights are equal.
TwoMeans two_means_threshold(const std::vector<double>& weights);

struct TestDecision {
    double xi = 0.5;
    std::vector<bool> reject;
    std::pair<double, double> centers{0.0, 0.0};  // (low, high)
    std::size_t n_rejected = 0;
    bool fallback = false;  // degenerate weights; xi = 0.5 used
    bool clipped = false;   // weights were clipped into [0, 1]
};

// Reject H0_i when weights[i] > xi, xi from two_means_threshold.
// Degenerate weights throw unless allow_fallback, which uses xi = 0.5.
TestDecision decide_weights(const std::vector<double>& weights, bool allow_fallback = false);

// Rule on the pseudo inclusion probabilities 1 - E(kappa | y).
TestDecision decide(const ShrinkageResult& shrinkage, bool allow_fallback = false);

// Same rule on kw_weight values, clipped to [0, 1].
TestDecision kw_decide(const NPMLESolution& sol, const CountDataset& counts,
                       bool allow_fallback = false);

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t misclassified() const { return fp + fn; }
};

ConfusionCounts confusion(const TestDecision& decision, const std::vector<bool>& truth);

}  // namespace countshrink
