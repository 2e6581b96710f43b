#pragma once

// Seeded generators and experiment drivers for the sparse-count studies.

#include <cstdint>
#include <string>
#include <vector>

#include "countshrink/eb_fit.hpp"
#include "countshrink/estimators.hpp"

namespace countshrink {

enum class Signal { folded_t3, poisson4, two_groups };

struct SimConfig {
    std::size_t n = 200;
    double omega = 0.1;
    std::size_t replications = 1000;
    std::uint64_t seed = 20180715;
    double contamination_p = 0.1;
    Signal signal = Signal::folded_t3;
    double poisson_mean = 4.0;
    TwoGroupsParams tg{};

    void validate() const;
};

struct SparseSample {
    std::vector<double> theta;
    std::vector<std::int64_t> y;
};

struct LabelledSample {
    std::vector<bool> truth;  // true = non-null
    std::vector<std::int64_t> y;
};

// theta_i ~ (1 - omega) delta_0 + omega |t_3|, y_i ~ Poi(theta_i).
SparseSample gen_sparse_t3(const SimConfig& cfg, std::uint64_t rep, std::uint64_t cell = 0);

// y_i = 0 w.p. 1 - omega, else Poi(poisson_mean); then round(p * #null zeros)
// null zeros, chosen uniformly, are set to 1. Truth labels are not changed.
LabelledSample gen_contaminated_zip(const SimConfig& cfg, std::uint64_t rep, std::uint64_t cell = 0);

// Null draws of the two-groups model: theta ~ Ga(alpha0, scale beta0), y ~ Poi(theta).
SparseSample gen_two_groups_null(const SimConfig& cfg, std::uint64_t rep, std::uint64_t cell = 0);

enum class Method { HS, KW, GH, Robbins, Global, ZIP, Naive };

std::string method_name(Method m);
Method parse_method(const std::string& name);
const std::vector<Method>& table1_methods();

struct RiskReport {
    std::string method;
    double abr_mean = 0.0;
    double abr_sd = 0.0;
    std::vector<double> per_rep_losses;  // NaN where the estimator failed
    std::size_t failures = 0;
};

struct Table1Cell {
    std::size_t n;
    double omega;
    std::vector<RiskReport> reports;  // in the order of the requested methods
};

struct SimOptions {
    std::size_t replications = 1000;
    std::uint64_t seed = 20180715;
    unsigned threads = 0;     // 0 = default_threads()
    double loss_scale = 100;  // reported risk = loss_scale * n^-1 ||theta_hat - theta||^2
    FitConfig fit = simulation_fit_config();
    NPMLEConfig npmle{};

    // Lighter grid than the interactive default; the local refinement still
    // converges to the same optimum on the smooth two-parameter surface.
    static FitConfig simulation_fit_config();
};

// Estimates of theta by one method on one dataset.
std::vector<double> estimate(Method m, const CountDataset& data, const SimOptions& opt);

std::vector<Table1Cell> run_table1(const std::vector<Method>& methods, const std::vector<std::size_t>& ns,
                                   const std::vector<double>& omegas, const SimOptions& opt);

struct ErrorReport {
    std::string method;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> per_rep;  // misclassified hypotheses
    std::size_t fallbacks = 0;    // replications where clustering degenerated
};

struct Table2Row {
    double omega;
    std::vector<ErrorReport> reports;  // GH, TPB, KW
};

// Ten omega values evenly spaced on [0.1, 0.3].
std::vector<double> table2_omegas();

std::vector<Table2Row> run_table2(const std::vector<double>& omegas, std::size_t n, double contamination_p,
                                  const SimOptions& opt);

struct Type1Row {
    double gamma;
    double empirical;
    double bound;
    std::size_t draws;
    std::size_t rejections;
};

struct Type1Options {
    std::size_t draws = 100000;
    double tau = 1e-3;
    double xi = 0.5;
    std::uint64_t seed = 20180715;
};

// Rejection frequency of 1 - E(kappa | y) > xi under null draws, next to type1_bound.
std::vector<Type1Row> run_type1_check(const TwoGroupsParams& tg, const std::vector<double>& gammas,
                                      const Type1Options& opt);

// Mean and sample sd over finite entries.
std::pair<double, double> mean_sd(const std::vector<double>& v);

}  // namespace countshrink
