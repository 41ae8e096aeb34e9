#pragma once

#include <functional>

namespace rbergomi::bs {

/// Standard normal CDF via erfc; absolute error well below 1e-15.
double norm_cdf(double x);

/// Inverse standard normal CDF (Wichura AS241, double precision).
double norm_ppf(double p);

/// OTM sign convention: put for k <= 0, call for k > 0.
inline int otm_sign(double k) { return k <= 0.0 ? -1 : +1; }

/// European option keyed by log-strike; the payoff sign is always derived
/// from k, never user-set.
struct OptionSpec {
    double k;
    double t;
    int w;

    OptionSpec(double log_strike, double maturity)
        : k(log_strike), t(maturity), w(otm_sign(log_strike)) {}
};

/// Black-Scholes price in total-variance form: w*(s*N(w*d+) - e^k*N(w*d-)),
/// d+- = (log(s) - k)/sqrt(v) +- sqrt(v)/2. At v = 0 returns the intrinsic
/// value (w*(s - e^k))^+.
double bs_price(double v, double s, double k, int w);

/// dPrice/dv at s fixed; vega in total-variance units.
double bs_vega_total_var(double v, double s, double k);

/// Inverse of v -> bs_price(v, 1, k, w) for OTM prices, to absolute price
/// tolerance 1e-12 (root solve switches to log-price in the far tails).
/// price = 0 maps to v = 0; prices at or beyond the arbitrage bound throw
/// std::domain_error.
double implied_total_variance(double price, double k);

/// sqrt(implied_total_variance / t).
double implied_vol(double price, double k, double t);

/// Forward delta N(-d-) at s = 1.
double forward_delta(double k, double sigma, double t);

/// Log-strike with put delta N(-d+) = delta_put under a smile k -> sigma(k);
/// 10-delta calls correspond to delta_put = 0.90. Damped fixed-point
/// iteration, residual below 1e-10 or std::runtime_error.
double logstrike_from_spot_delta(double delta_put, const std::function<double(double)>& smile,
                                 double t);

/// Flat-smile overload.
double logstrike_from_spot_delta(double delta_put, double sigma, double t);

}  // namespace rbergomi::bs
