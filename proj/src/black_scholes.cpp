#include "rbergomi/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbergomi::bs {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// Wichura's algorithm AS241 (PPND16).
double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::domain_error("norm_ppf: p must be in [0, 1]");
    }
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

double bs_price(double v, double s, double k, int w) {
    if (v < 0.0) throw std::domain_error("bs_price: negative total variance");
    if (!(s > 0.0)) throw std::domain_error("bs_price: spot must be > 0");
    const double ek = std::exp(k);
    if (v == 0.0) return std::max(w * (s - ek), 0.0);
    const double sv = std::sqrt(v);
    const double dp = (std::log(s) - k) / sv + 0.5 * sv;
    const double dm = dp - sv;
    return w * (s * norm_cdf(w * dp) - ek * norm_cdf(w * dm));
}

double bs_vega_total_var(double v, double s, double k) {
    if (v <= 0.0) return 0.0;
    const double sv = std::sqrt(v);
    const double dp = (std::log(s) - k) / sv + 0.5 * sv;
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return s * inv_sqrt_2pi * std::exp(-0.5 * dp * dp) / (2.0 * sv);
}

double implied_total_variance(double price, double k) {
    const int w = otm_sign(k);
    const double bound = w > 0 ? 1.0 : std::exp(k);
    if (price < 0.0 || price >= bound)
        throw std::domain_error("implied_total_variance: price outside arbitrage bounds");
    if (price == 0.0) return 0.0;

    double lo = 1e-12, hi = 16.0;
    if (bs_price(lo, 1.0, k, w) >= price) return lo;
    while (bs_price(hi, 1.0, k, w) < price) {
        hi *= 2.0;
        if (hi > 1e6) throw std::domain_error("implied_total_variance: price too close to bound");
    }

    // Small prices: solve on log(price), where the tolerance stays meaningful
    // (an absolute price tolerance buys little v accuracy once vega is tiny).
    const bool log_space = price < 1e-4;
    const double target = log_space ? std::log(price) : price;
    const double tol_f = log_space ? 1e-11 : 1e-14;
    double v = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double p = bs_price(v, 1.0, k, w);
        double f, fp;
        if (log_space) {
            f = (p > 0.0 ? std::log(p) : -800.0) - target;
            fp = p > 0.0 ? bs_vega_total_var(v, 1.0, k) / p : 0.0;
        } else {
            f = p - target;
            fp = bs_vega_total_var(v, 1.0, k);
        }
        if (std::abs(f) <= tol_f) return v;
        if (f > 0.0) hi = v; else lo = v;
        double next = std::numeric_limits<double>::quiet_NaN();
        if (std::isfinite(fp) && fp > 0.0) next = v - f / fp;
        if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * (1.0 + hi)) return 0.5 * (lo + hi);
        v = next;
    }
    return v;
}

double implied_vol(double price, double k, double t) {
    if (!(t > 0.0)) throw std::domain_error("implied_vol: maturity must be > 0");
    return std::sqrt(implied_total_variance(price, k) / t);
}

double forward_delta(double k, double sigma, double t) {
    if (!(sigma > 0.0)) throw std::domain_error("forward_delta: sigma must be > 0");
    const double sv = sigma * std::sqrt(t);
    const double dm = -k / sv - 0.5 * sv;
    return norm_cdf(-dm);
}

double logstrike_from_spot_delta(double delta_put, const std::function<double(double)>& smile,
                                 double t) {
    if (!(delta_put > 0.0 && delta_put < 1.0))
        throw std::domain_error("logstrike_from_spot_delta: delta must be in (0, 1)");
    const double z = norm_ppf(delta_put);
    // N(-d+) = delta  <=>  k = sqrt(v) z + v/2 with v = sigma(k)^2 t.
    double sigma0 = smile(0.0);
    if (!(sigma0 > 0.0)) throw std::runtime_error("logstrike_from_spot_delta: smile not positive");
    double k = std::sqrt(sigma0 * sigma0 * t) * z + 0.5 * sigma0 * sigma0 * t;
    double damping = 1.0;
    double prev_step = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double sig = smile(k);
        if (!(sig > 0.0)) throw std::runtime_error("logstrike_from_spot_delta: smile not positive");
        const double v = sig * sig * t;
        const double k_next = std::sqrt(v) * z + 0.5 * v;
        const double step = k_next - k;
        if (it > 0 && step * prev_step < 0.0) damping *= 0.5;  // oscillation
        prev_step = step;
        k += damping * step;
        const double vv = smile(k) * smile(k) * t;
        const double residual = norm_cdf(-((-k) / std::sqrt(vv) + 0.5 * std::sqrt(vv))) - delta_put;
        if (std::abs(residual) <= 1e-10) return k;
    }
    throw std::runtime_error("logstrike_from_spot_delta: no convergence");
}

double logstrike_from_spot_delta(double delta_put, double sigma, double t) {
    return logstrike_from_spot_delta(delta_put, [sigma](double) { return sigma; }, t);
}

}  // namespace rbergomi::bs
