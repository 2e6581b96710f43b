#pragma once

#include <cstdint>
#include <random>

namespace countshrink {

// Deterministic random stream keyed by (seed, cell, rep, tag). Each key gets its
// own mt19937_64 state through std::seed_seq, so replications can run in any
// order or thread and still reproduce bit for bit. Variates come from
// Boost.Random distributions, whose algorithms are fixed across platforms
// (unlike the std:: distributions).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t cell, std::uint64_t rep, std::uint64_t tag = 0);

    double uniform();  // [0, 1)
    double normal();
    double gamma(double shape, double scale);
    double student_t(double dof);
    std::int64_t poisson(double mean);  // Poi(0) == 0
    bool bernoulli(double p);
    std::uint64_t below(std::uint64_t n);  // uniform on {0, ..., n-1}

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace countshrink
