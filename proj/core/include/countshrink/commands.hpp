#pragma once

// Command implementations behind the countshrink CLI. Each returns a RunRecord;
// the executable maps exceptions to exit codes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "countshrink/dataset.hpp"
#include "countshrink/io.hpp"
#include "countshrink/simlab.hpp"

namespace countshrink {

struct FitCommandOptions {
    double alpha = 0.5;
    std::optional<double> gamma;  // fixed gamma; otherwise searched on [0, gamma_max]
    double gamma_max = 20.0;
    double tau_min = kMinTau;
    unsigned threads = 0;

    FitConfig fit_config() const;
};

RunRecord cmd_fit(const CountDataset& data, const FitCommandOptions& opts);

// method: "gh", "hs" or "kw".
RunRecord cmd_test(const CountDataset& data, const std::string& method, const FitCommandOptions& opts);

struct SimulateOptions {
    std::uint64_t seed = 20180715;
    std::size_t reps = 1000;
    unsigned threads = 0;
};

struct BandCheck {
    std::string name;
    bool pass;
    std::string detail;
};

struct SimulateOutcome {
    RunRecord record;
    std::vector<BandCheck> checks;
    bool all_pass() const;
};

// suite: "table1", "table2" or "type1". Throws std::invalid_argument on an unknown suite.
SimulateOutcome cmd_simulate(const std::string& suite, const SimulateOptions& opts);

std::vector<BandCheck> check_table1(const std::vector<Table1Cell>& cells);
std::vector<BandCheck> check_table2(const std::vector<Table2Row>& rows);
std::vector<BandCheck> check_type1(const std::vector<Type1Row>& rows);

// Wall-clock timings of the main kernels.
RunRecord cmd_bench(std::size_t reps);

}  // namespace countshrink
