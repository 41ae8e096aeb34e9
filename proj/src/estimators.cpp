#include "rbergomi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbergomi {

const char* to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Base: return "base";
        case EstimatorKind::Antithetic: return "antithetic";
        case EstimatorKind::Conditional: return "conditional";
        case EstimatorKind::Controlled: return "controlled";
        case EstimatorKind::Mixed: return "mixed";
    }
    return "?";
}

EstimatorKind estimator_from_string(const std::string& name) {
    if (name == "base") return EstimatorKind::Base;
    if (name == "antithetic") return EstimatorKind::Antithetic;
    if (name == "conditional") return EstimatorKind::Conditional;
    if (name == "controlled") return EstimatorKind::Controlled;
    if (name == "mixed") return EstimatorKind::Mixed;
    throw std::invalid_argument("unknown estimator: " + name);
}

std::vector<double> base_payoff(const PathFunctionals& pf, const bs::OptionSpec& spec) {
    if (!pf.has_full_price()) throw std::invalid_argument("base_payoff: S_t not populated");
    const double ek = std::exp(spec.k);
    std::vector<double> x(pf.s_t.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::max(spec.w * (pf.s_t[i] - ek), 0.0);
    return x;
}

std::vector<double> conditional_x(const PathFunctionals& pf, const bs::OptionSpec& spec,
                                  double rho) {
    const double factor = 1.0 - rho * rho;
    std::vector<double> x(pf.s1_t.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = bs::bs_price(factor * pf.iv[i], pf.s1_t[i], spec.k, spec.w);
    return x;
}

double q_hat(std::span<const double> iv) {
    if (iv.empty()) throw std::invalid_argument("q_hat: empty sample");
    return *std::max_element(iv.begin(), iv.end());
}

std::vector<double> control_y(const PathFunctionals& pf, const bs::OptionSpec& spec, double rho,
                              double q, EstimatorKind kind) {
    if (kind != EstimatorKind::Mixed && kind != EstimatorKind::Controlled)
        throw std::invalid_argument("control_y: estimator has no control variate");
    std::vector<double> y(pf.iv.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double budget = q - pf.iv[i];
        if (budget < 0.0) throw std::invalid_argument("control_y: q below sampled max iv");
        if (kind == EstimatorKind::Mixed) {
            y[i] = bs::bs_price(rho * rho * budget, pf.s1_t[i], spec.k, spec.w);
        } else {
            y[i] = bs::bs_price(budget, pf.s_t[i], spec.k, spec.w);
        }
    }
    return y;
}

double alpha_hat(std::span<const double> x, std::span<const double> y) {
    if (y.empty()) throw std::invalid_argument("alpha_hat: empty control sample");
    if (y.size() < 2) return 0.0;
    const double n = static_cast<double>(y.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (syy / (n - 1.0) < 1e-18) return 0.0;
    return -sxy / syy;
}

double timer_expectation(double rho, double q, const bs::OptionSpec& spec, EstimatorKind kind) {
    if (q < 0.0) throw std::invalid_argument("timer_expectation: negative budget");
    const double v = kind == EstimatorKind::Controlled ? q : rho * rho * q;
    return bs::bs_price(v, 1.0, spec.k, spec.w);
}

EstimatorSample assemble_sample(EstimatorKind kind, const PathFunctionals& pf,
                                const bs::OptionSpec& spec, double rho) {
    EstimatorSample s;
    s.n = pf.n_rows();
    switch (kind) {
        case EstimatorKind::Base:
        case EstimatorKind::Antithetic:
            s.x = base_payoff(pf, spec);
            break;
        case EstimatorKind::Conditional:
            s.x = conditional_x(pf, spec, rho);
            break;
        case EstimatorKind::Controlled:
            s.x = base_payoff(pf, spec);
            s.q_hat = q_hat(pf.iv);
            s.y = control_y(pf, spec, rho, s.q_hat, kind);
            s.ey = timer_expectation(rho, s.q_hat, spec, kind);
            break;
        case EstimatorKind::Mixed:
            s.x = conditional_x(pf, spec, rho);
            s.q_hat = q_hat(pf.iv);
            s.y = control_y(pf, spec, rho, s.q_hat, kind);
            s.ey = timer_expectation(rho, s.q_hat, spec, kind);
            break;
    }
    if (!s.y.empty()) s.alpha_hat = alpha_hat(s.x, s.y);
    return s;
}

IvEstimate estimate_implied_vol(EstimatorKind kind, const PathFunctionals& pf,
                                const bs::OptionSpec& spec, double rho) {
    const EstimatorSample s = assemble_sample(kind, pf, spec, rho);
    double acc = 0.0;
    if (s.y.empty()) {
        for (double xi : s.x) acc += xi;
    } else {
        for (std::size_t i = 0; i < s.x.size(); ++i) acc += s.x[i] + s.alpha_hat * s.y[i];
    }
    const double p = acc / static_cast<double>(s.n) - s.alpha_hat * s.ey;

    IvEstimate est;
    est.p_hat = p;
    est.alpha_hat = s.alpha_hat;
    est.q_hat = s.q_hat;
    est.ey = s.ey;
    const double bound = spec.w > 0 ? 1.0 : std::exp(spec.k);
    if (p <= 0.0) {
        est.sigma = 0.0;
        est.status = EstimateStatus::ClampedZeroVol;
    } else if (p >= bound) {
        est.sigma = std::numeric_limits<double>::quiet_NaN();
        est.status = EstimateStatus::AboveBound;
    } else {
        est.sigma = bs::implied_vol(p, spec.k, spec.t);
        est.status = EstimateStatus::Ok;
    }
    return est;
}

double p_hat_standard_error(const EstimatorSample& sample, bool antithetic,
                            std::size_t n_batches) {
    const std::size_t n = sample.n;
    if (n < 4) return std::numeric_limits<double>::quiet_NaN();
    std::size_t groups = std::min(n_batches, n / 2);
    if (groups < 2) groups = 2;
    std::size_t per = n / groups;
    if (antithetic && per % 2 != 0) per -= 1;  // whole pairs per batch
    if (per == 0) per = antithetic ? 2 : 1;
    groups = n / per;

    std::vector<double> means;
    means.reserve(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t begin = g * per;
        const std::size_t end = g + 1 == groups ? n : begin + per;
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            acc += sample.y.empty() ? sample.x[i] : sample.x[i] + sample.alpha_hat * sample.y[i];
        }
        means.push_back(acc / static_cast<double>(end - begin));
    }
    double m = 0.0;
    for (double v : means) m += v;
    m /= static_cast<double>(means.size());
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    var /= static_cast<double>(means.size() - 1);
    return std::sqrt(var / static_cast<double>(means.size()));
}

}  // namespace rbergomi
