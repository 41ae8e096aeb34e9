#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbergomi/estimators.hpp"
#include "rbergomi/rbergomi.hpp"

namespace rbergomi {

struct StrikeSpec {
    std::string label;
    double k;
    double target_vol;
};

/// Reference log-strikes and 3M implied vols for the two experiment regimes;
/// empty when rho matches neither.
std::vector<StrikeSpec> default_benchmark_strikes(double rho);

struct RepeatedConfig {
    ModelParams model;
    double maturity = 0.25;
    std::size_t n_steps = 312;
    std::size_t n_paths = 1000;
    std::size_t n_reps = 1000;
    std::vector<StrikeSpec> strikes;
    std::uint64_t seed = 42;
    int threads = 0;
};

struct StrikeStats {
    StrikeSpec spec;
    std::vector<double> sigmas;  // non-flagged replications
    std::size_t n_flagged = 0;
    double bias = 0.0;
    double stddev = 0.0;
    double mse_vs_target = 0.0;  // (1/(N-1)) sum (sigma_i - target)^2
};

struct RepeatedResult {
    EstimatorKind kind;
    std::vector<StrikeStats> per_strike;
    double tau_ms = 0.0;
    double phi2 = 0.0;
    double psi2 = 0.0;
};

/// N replications on distinct substreams; per-strike bias/std against the
/// configured targets, tau = per-replication CPU time in ms (all strikes
/// amortised).
RepeatedResult repeated_estimation(EstimatorKind kind, const RepeatedConfig& cfg);

/// phi2 = mean over strikes of the (N-1)-normalised squared error vs target;
/// psi2 = tau * phi2.
std::pair<double, double> error_measures(const std::vector<StrikeStats>& per_strike,
                                         double tau_ms);

struct SmilePoint {
    double delta_put = 0.0;
    double k = 0.0;
    double sigma = 0.0;
    double std_err = 0.0;
    bool flagged = false;
};

struct MaturitySmile {
    double maturity = 0.0;
    std::vector<SmilePoint> points;
};

struct SmileSurface {
    std::vector<MaturitySmile> maturities;
};

struct SmileConfig {
    std::vector<double> maturities{1.0 / 365, 1.0 / 52, 2.0 / 52, 1.0 / 12, 2.0 / 12,
                                   0.25, 0.5, 1.0};
    std::vector<double> deltas;  // empty -> 0.05..0.95 step 0.05
    std::size_t n_paths = 400000;
    std::size_t n_steps = 312;
    EstimatorKind kind = EstimatorKind::Mixed;
    std::uint64_t seed = 42;
    int threads = 0;
};

/// Two-pass smile: a provisional equally-spaced-strike pass pins the smile
/// shape, then delta-strikes are solved against it and re-estimated.
SmileSurface generate_smile(const ModelParams& model, const SmileConfig& cfg);

struct DeltaPoint {
    double delta = 0.0;  // forward delta N(-d-)
    double k = 0.0;
    double sigma = 0.0;
};

struct DeltaSmile {
    double maturity = 0.0;
    std::vector<DeltaPoint> points;  // sorted by delta
};

/// Re-keys smile points by forward delta; flagged or zero-vol points are
/// dropped.
DeltaSmile to_delta_space(const MaturitySmile& smile);

/// t * integral_0^1 sigma(Delta)^2 dDelta with a natural cubic spline over
/// the observed deltas and constant extrapolation to the endpoints; equals
/// integral_0^t xi0(u) du in expectation. Needs at least 5 points.
double extract_forward_variance(const DeltaSmile& smile);

struct CalibrationTargets {
    double maturity = 0.25;
    std::vector<double> ks;
    std::vector<double> vols;
};

struct CalibrationOptions {
    double rho_min = -0.99, rho_max = 0.99;
    double eta_min = 1.00, eta_max = 3.00;
    double rho_init = -0.9, eta_init = 1.9;
    std::size_t n_paths = 1000;
    std::size_t n_steps = 312;
    EstimatorKind kind = EstimatorKind::Mixed;
    std::uint64_t seed = 42;      // frozen across objective evaluations
    double budget_ms = 700.0;     // <= 0: no wall-clock cap
    int max_evals = 80;           // <= 0: no cap
    int threads = 1;
};

struct CalibrationResult {
    double rho_hat = 0.0;
    double eta_hat = 0.0;
    double rmse = 0.0;
    int iterations = 0;  // objective evaluations
    bool converged = false;
    std::string method = "nelder-mead";
};

/// Bounded Nelder-Mead minimisation of the implied-vol RMSE against the
/// target smile, with common random numbers across evaluations. Estimator
/// failure at a candidate makes that objective +inf.
CalibrationResult calibrate_rho_eta(const CalibrationTargets& targets,
                                    const ModelParams& base_model,
                                    const CalibrationOptions& opts);

/// Repeated calibrations against one fixed target smile; restart r uses an
/// independent estimator substream of opts.seed.
std::vector<CalibrationResult> run_calibration_restarts(const CalibrationTargets& targets,
                                                        const ModelParams& base_model,
                                                        const CalibrationOptions& opts,
                                                        std::size_t n_restarts);

}  // namespace rbergomi
