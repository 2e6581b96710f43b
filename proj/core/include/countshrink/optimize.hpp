#pragma once

#include <functional>
#include <vector>

namespace countshrink::opt {

using Objective = std::function<double(const std::vector<double>&)>;

struct Box {
    std::vector<double> lo, hi;
    std::vector<double> clamp(std::vector<double> x) const;
};

struct NMResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
};

// Nelder-Mead maximisation inside a box; trial points are clamped onto the box,
// so optima on the boundary are reached exactly. Stops when the simplex value
// spread falls below ftol (absolute) or after max_iters iterations.
NMResult nelder_mead_max(const Objective& f, std::vector<double> x0, std::vector<double> step,
                         const Box& box, int max_iters, double ftol = 1e-9);

// Golden-section/Brent maximisation of a 1-D function on [lo, hi].
struct Max1D {
    double x;
    double value;
};
Max1D brent_max(const std::function<double(double)>& f, double lo, double hi, int bits = 40,
                int max_iters = 200);

}  // namespace countshrink::opt
