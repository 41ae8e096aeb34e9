#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbergomi/experiment.hpp"

namespace rbergomi::cli {

/// Exit codes: 0 ok, 2 config error, 3 I/O error, 4 numerical failure.
enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kNumericalError = 4 };

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Fully resolved run configuration; `resolved` keeps the provenance lines
/// (every key, defaults included, in canonical order).
struct RunConfig {
    std::string command;
    std::string out;
    std::uint64_t seed = 42;
    int threads = 0;

    double xi0 = 0.235 * 0.235;
    std::vector<double> xi0_times, xi0_values;
    double eta = 1.9;
    double rho = -0.9;
    double alpha = -0.43;
    std::size_t n_steps = 312;
    double maturity = 0.25;

    std::size_t n_paths = 0;  // command-specific default
    bool antithetic = true;

    std::string estimator = "mixed";
    std::vector<std::string> estimators;
    std::vector<double> maturities;
    std::vector<double> deltas;

    std::size_t n_reps = 1000;
    std::vector<std::string> labels;
    std::vector<double> strikes, targets;

    std::size_t restarts = 20;
    double budget_ms = 700.0;
    int max_evals = 80;
    double rho_min = -0.99, rho_max = 0.99;
    double eta_min = 1.00, eta_max = 3.00;
    double rho_init = 0.0, eta_init = 0.0;  // 0 sentinel -> model values
    std::vector<double> target_ks, target_vols;
    std::size_t target_n_paths = 200000;

    std::vector<std::pair<std::string, std::string>> resolved;

    ModelParams model() const;
};

/// Parses `<command> [--config FILE] [--key=value ...] --out PATH`.
/// Throws ConfigError naming the offending field.
RunConfig parse_config(const std::vector<std::string>& args);

/// Runs a parsed command; returns an exit code.
int run_command(const RunConfig& cfg);

/// Entry point used by the binary: parse + dispatch + error reporting.
int run_cli(int argc, char** argv);

/// "%.10g" rendering used by every CSV column.
std::string format_float(double v);

}  // namespace rbergomi::cli
