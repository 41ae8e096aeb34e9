#pragma once

#include <span>
#include <string>
#include <vector>

#include "rbergomi/black_scholes.hpp"
#include "rbergomi/rbergomi.hpp"

namespace rbergomi {

enum class EstimatorKind { Base, Antithetic, Conditional, Controlled, Mixed };

const char* to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(const std::string& name);

/// Base draws independent paths; the rest evaluate on antithetic pairs.
inline bool uses_antithetic(EstimatorKind kind) { return kind != EstimatorKind::Base; }

/// Conditional and Mixed never consume W2.
inline bool requires_w2(EstimatorKind kind) {
    return kind == EstimatorKind::Base || kind == EstimatorKind::Antithetic ||
           kind == EstimatorKind::Controlled;
}

/// X_i = (w (S_i - e^k))^+.
std::vector<double> base_payoff(const PathFunctionals& pf, const bs::OptionSpec& spec);

/// X_i = BS((1 - rho^2) iv_i; S1_i, k): the payoff's conditional expectation
/// given the W1 path.
std::vector<double> conditional_x(const PathFunctionals& pf, const bs::OptionSpec& spec,
                                  double rho);

/// Sampled variance budget sup_i iv_i.
double q_hat(std::span<const double> iv);

/// Timer-option control variate. Mixed: Y_i = BS(rho^2 (q - iv_i); S1_i, k);
/// Controlled: Y_i = BS(q - iv_i; S_i, k). Requires q >= max(iv).
std::vector<double> control_y(const PathFunctionals& pf, const bs::OptionSpec& spec, double rho,
                              double q, EstimatorKind kind);

/// Negative OLS slope of X on Y; 0 when Var(Y) < 1e-18 (degenerate control,
/// realises the rho -> 0 limit).
double alpha_hat(std::span<const double> x, std::span<const double> y);

/// E[Y] = BS(rho^2 q; 1, k) (Mixed) or BS(q; 1, k) (Controlled).
double timer_expectation(double rho, double q, const bs::OptionSpec& spec, EstimatorKind kind);

/// Assembled (X, Y) sample with its estimator metadata.
struct EstimatorSample {
    std::vector<double> x;
    std::vector<double> y;  // empty when Y = 0
    double alpha_hat = 0.0;
    double q_hat = 0.0;
    double ey = 0.0;
    std::size_t n = 0;
};

EstimatorSample assemble_sample(EstimatorKind kind, const PathFunctionals& pf,
                                const bs::OptionSpec& spec, double rho);

enum class EstimateStatus { Ok, ClampedZeroVol, AboveBound };

struct IvEstimate {
    double sigma = 0.0;  // NaN when AboveBound
    double p_hat = 0.0;
    double alpha_hat = 0.0;
    double q_hat = 0.0;
    double ey = 0.0;
    EstimateStatus status = EstimateStatus::Ok;

    bool flagged() const { return status != EstimateStatus::Ok; }
};

/// P_hat = mean(X + alpha Y) - alpha E[Y], inverted to implied vol. Prices
/// at or below zero clamp to vol 0 (flagged); prices at or above the
/// arbitrage bound are flagged with sigma = NaN instead of throwing.
IvEstimate estimate_implied_vol(EstimatorKind kind, const PathFunctionals& pf,
                                const bs::OptionSpec& spec, double rho);

/// P_hat standard error from contiguous batch means (whole antithetic pairs
/// per batch), for smile reporting.
double p_hat_standard_error(const EstimatorSample& sample, bool antithetic,
                            std::size_t n_batches = 64);

}  // namespace rbergomi
