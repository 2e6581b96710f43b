// countshrink: GH shrinkage for sparse Poisson counts from the command line.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 assertion failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "countshrink/commands.hpp"
#include "countshrink/errors.hpp"
#include "countshrink/io.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kAssert = 3 };

void emit(const countshrink::RunRecord& rec, const std::string& out) {
    for (const auto& w : rec.warnings) std::cerr << "warning: " << w << "\n";
    if (out.empty() || out == "-") {
        std::cout << rec.tables.front().to_csv();
        std::cerr << rec.metadata_json();
        return;
    }
    for (const auto& p : rec.write(out)) std::cerr << "wrote " << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    using namespace countshrink;

    CLI::App app{"GH shrinkage, testing and simulation for sparse Poisson counts"};
    app.require_subcommand(1);

    std::string input, count_col = "count", exposure_col, out, method = "gh", suite;
    FitCommandOptions fo;
    std::optional<double> gamma;
    SimulateOptions so;
    bool assert_bands = false;
    std::size_t bench_reps = 20;

    auto add_data = [&](CLI::App* c) {
        c->add_option("--input", input, "CSV file with a count column")->required()->check(CLI::ExistingFile);
        c->add_option("--count-col", count_col, "name of the count column")->capture_default_str();
        c->add_option("--exposure-col", exposure_col, "column holding a constant exposure N");
    };
    auto add_fit = [&](CLI::App* c) {
        c->add_option("--alpha", fo.alpha, "gamma-layer shape alpha")->capture_default_str()->check(CLI::PositiveNumber);
        c->add_option("--gamma", gamma, "fix gamma instead of estimating it")->check(CLI::NonNegativeNumber);
        c->add_option("--gamma-max", fo.gamma_max, "upper end of the gamma search")->capture_default_str()->check(CLI::NonNegativeNumber);
        c->add_option("--tau-min", fo.tau_min, "lower end of the tau search")->capture_default_str()->check(CLI::Range(1e-6, 1.0));
    };

    auto* fit = app.add_subcommand("fit", "estimate (tau, gamma) and report posterior shrinkage per observation");
    add_data(fit);
    add_fit(fit);
    fit->add_option("--out", out, "output prefix (default: CSV to stdout, metadata to stderr)");

    auto* test = app.add_subcommand("test", "flag non-null observations by two-means thresholding");
    add_data(test);
    add_fit(test);
    test->add_option("--method", method, "gh, hs or kw")->capture_default_str()->check(CLI::IsMember({"gh", "hs", "kw"}));
    test->add_option("--out", out, "output prefix");

    auto* sim = app.add_subcommand("simulate", "run a simulation suite: table1, table2 or type1");
    sim->add_option("suite", suite, "table1, table2 or type1")->required();
    sim->add_option("--seed", so.seed, "master seed")->capture_default_str();
    sim->add_option("--reps", so.reps, "replications per cell")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--out", out, "output prefix");
    sim->add_flag("--assert", assert_bands, "exit 3 when a reproduction band is violated");

    auto* bench = app.add_subcommand("bench", "time the core kernels");
    bench->add_option("--reps", bench_reps, "calls per kernel")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--out", out, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    fo.gamma = gamma;

    try {
        if (*fit || *test) {
            CsvOptions co;
            co.count_col = count_col;
            if (!exposure_col.empty()) co.exposure_col = exposure_col;
            const std::string bytes = read_file(input);
            const CountDataset data = parse_csv(bytes, co);
            RunRecord rec = *fit ? cmd_fit(data, fo) : cmd_test(data, method, fo);
            rec.input_digest = sha256_hex(bytes);
            rec.config.insert(rec.config.begin(), {"input", input});
            emit(rec, out);
            return kOk;
        }
        if (*sim) {
            if (suite != "table1" && suite != "table2" && suite != "type1") {
                std::cerr << "error: unknown suite '" << suite << "' (expected table1, table2 or type1)\n";
                return kUsage;
            }
            const auto res = cmd_simulate(suite, so);
            emit(res.record, out);
            for (const auto& c : res.checks)
                std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
            return assert_bands && !res.all_pass() ? kAssert : kOk;
        }
        if (*bench) {
            emit(cmd_bench(bench_reps), out);
            return kOk;
        }
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
