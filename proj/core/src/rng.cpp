#include "countshrink/rng.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace countshrink {

namespace {

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t cell, std::uint64_t rep, std::uint64_t tag) {
    std::seed_seq seq{lo32(seed), hi32(seed), lo32(cell), hi32(cell),
                      lo32(rep),  hi32(rep),  lo32(tag),  hi32(tag)};
    eng_.seed(seq);
}

double RngStream::uniform() { return boost::random::uniform_01<double>{}(eng_); }

double RngStream::normal() { return boost::random::normal_distribution<double>{}(eng_); }

double RngStream::gamma(double shape, double scale) {
    return boost::random::gamma_distribution<double>{shape, scale}(eng_);
}

double RngStream::student_t(double dof) {
    return boost::random::student_t_distribution<double>{dof}(eng_);
}

std::int64_t RngStream::poisson(double mean) {
    if (mean <= 0.0) return 0;
    return boost::random::poisson_distribution<std::int64_t, double>{mean}(eng_);
}

bool RngStream::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return boost::random::bernoulli_distribution<double>{p}(eng_);
}

std::uint64_t RngStream::below(std::uint64_t n) {
    return boost::random::uniform_int_distribution<std::uint64_t>{0, n - 1}(eng_);
}

}  // namespace countshrink
