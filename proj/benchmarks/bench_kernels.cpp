#include <cmath>
#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "countshrink/eb_fit.hpp"
#include "countshrink/estimators.hpp"
#include "countshrink/gh_core.hpp"
#include "countshrink/multitest.hpp"
#include "countshrink/rng.hpp"
#include "countshrink/simlab.hpp"
#include "countshrink/specfun.hpp"

using namespace countshrink;

namespace {

std::vector<std::int64_t> sparse_counts(std::size_t n) {
    SimConfig cfg;
    cfg.n = n;
    cfg.omega = 0.1;
    return gen_sparse_t3(cfg, 0).y;
}

// Argument is -log10(1 - w); large values exercise the near-singular path.
void BM_log_gauss_2f1(benchmark::State& state) {
    const double w = 1.0 - std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(specfun::log_gauss_2f1(5.0, 1.0, 30.5, w));
}
BENCHMARK(BM_log_gauss_2f1)->Arg(1)->Arg(4)->Arg(12);

void BM_posterior_kappa_mean(benchmark::State& state) {
    const GHParams p{0.5, 1.0, 0.05};
    for (auto _ : state) benchmark::DoNotOptimize(posterior_kappa_moment(1, 13, p));
}
BENCHMARK(BM_posterior_kappa_mean);

void BM_marginal_batch(benchmark::State& state) {
    std::vector<std::int64_t> ys(state.range(0));
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = static_cast<std::int64_t>(i);
    const GHParams p{0.5, 2.0, 0.1};
    for (auto _ : state) benchmark::DoNotOptimize(marginal_log_pmf_batch(ys, p));
}
BENCHMARK(BM_marginal_batch)->Arg(10)->Arg(40);

void BM_eb_fit(benchmark::State& state) {
    const auto data = CountDataset::from_counts(sparse_counts(state.range(0)));
    FitConfig cfg;
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(fit(data, cfg));
}
BENCHMARK(BM_eb_fit)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_kw_npmle(benchmark::State& state) {
    const auto data = CountDataset::from_counts(sparse_counts(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kw_npmle(data));
}
BENCHMARK(BM_kw_npmle)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_two_means(benchmark::State& state) {
    RngStream rng(1, 0, 0);
    std::vector<double> w(state.range(0));
    for (auto& v : w) v = rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(two_means_threshold(w));
}
BENCHMARK(BM_two_means)->Arg(1000)->Arg(100000);

}  // namespace
BENCHMARK_MAIN();
