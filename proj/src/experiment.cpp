#include "rbergomi/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "rbergomi/parallel.hpp"
#include "rbergomi/spline.hpp"

namespace rbergomi {

namespace {

// Domain tags keep substreams from distinct purposes apart.
constexpr std::uint64_t kTagReplication = 1;
constexpr std::uint64_t kTagMaturity = 2;
constexpr std::uint64_t kTagRestart = 3;

std::uint64_t seed_for(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return rng::derive_stream(rng::derive_stream(seed, tag), index);
}

}  // namespace

std::vector<StrikeSpec> default_benchmark_strikes(double rho) {
    if (std::abs(rho + 0.9) < 1e-12)
        return {{"10P", -0.1787, 0.2961}, {"ATM", 0.0, 0.2061}, {"10C", 0.1041, 0.1576}};
    if (std::abs(rho) < 1e-12)
        return {{"10P", -0.1475, 0.2417}, {"ATM", 0.0, 0.2173}, {"10C", 0.1656, 0.2466}};
    return {};
}

RepeatedResult repeated_estimation(EstimatorKind kind, const RepeatedConfig& cfg) {
    if (cfg.n_reps < 2) throw std::invalid_argument("repeated_estimation: need N >= 2");
    if (cfg.n_paths < 2) throw std::invalid_argument("repeated_estimation: need n >= 2");
    if (cfg.strikes.empty()) throw std::invalid_argument("repeated_estimation: no strikes");

    const TimeGrid grid(cfg.n_steps, cfg.maturity);
    const std::size_t m = cfg.strikes.size();
    const std::size_t big_n = cfg.n_reps;
    std::vector<double> sigmas(big_n * m, std::numeric_limits<double>::quiet_NaN());

    TerminalOptions topts;
    topts.antithetic = uses_antithetic(kind);
    topts.with_full_price = requires_w2(kind);
    topts.threads = 1;  // replications carry the parallelism

    const int threads = resolve_threads(cfg.threads);
    const auto t0 = std::chrono::steady_clock::now();
    detail::parallel_over(big_n, threads, 1, [&](std::size_t r) {
        const std::uint64_t rep_seed = seed_for(cfg.seed, kTagReplication, r);
        const PathFunctionals pf =
            simulate_terminals(cfg.model, grid, cfg.n_paths, rep_seed, topts);
        for (std::size_t j = 0; j < m; ++j) {
            const bs::OptionSpec spec(cfg.strikes[j].k, cfg.maturity);
            const IvEstimate est = estimate_implied_vol(kind, pf, spec, cfg.model.rho);
            if (!est.flagged()) sigmas[r * m + j] = est.sigma;
        }
    });
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const int workers = static_cast<int>(std::min<std::size_t>(threads, big_n));

    RepeatedResult res;
    res.kind = kind;
    res.tau_ms = wall_ms * workers / static_cast<double>(big_n);
    res.per_strike.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        StrikeStats& st = res.per_strike[j];
        st.spec = cfg.strikes[j];
        for (std::size_t r = 0; r < big_n; ++r) {
            const double s = sigmas[r * m + j];
            if (std::isnan(s)) {
                ++st.n_flagged;
            } else {
                st.sigmas.push_back(s);
            }
        }
        const double n_ok = static_cast<double>(st.sigmas.size());
        if (n_ok >= 2) {
            double mean = 0.0;
            for (double s : st.sigmas) mean += s;
            mean /= n_ok;
            double var = 0.0, mse = 0.0;
            for (double s : st.sigmas) {
                var += (s - mean) * (s - mean);
                mse += (s - st.spec.target_vol) * (s - st.spec.target_vol);
            }
            st.bias = mean - st.spec.target_vol;
            st.stddev = std::sqrt(var / (n_ok - 1.0));
            st.mse_vs_target = mse / (n_ok - 1.0);
        }
    }
    const auto [phi2, psi2] = error_measures(res.per_strike, res.tau_ms);
    res.phi2 = phi2;
    res.psi2 = psi2;
    return res;
}

std::pair<double, double> error_measures(const std::vector<StrikeStats>& per_strike,
                                         double tau_ms) {
    if (per_strike.empty()) throw std::invalid_argument("error_measures: no strikes");
    double phi2 = 0.0;
    for (const auto& st : per_strike) phi2 += st.mse_vs_target;
    phi2 /= static_cast<double>(per_strike.size());
    return {phi2, tau_ms * phi2};
}

namespace {

struct InterpolatedSmile {
    std::vector<double> ks, sigmas;

    double operator()(double k) const {
        if (k <= ks.front()) return sigmas.front();
        if (k >= ks.back()) return sigmas.back();
        const auto it = std::upper_bound(ks.begin(), ks.end(), k);
        const std::size_t i = it - ks.begin();
        const double w = (k - ks[i - 1]) / (ks[i] - ks[i - 1]);
        return (1.0 - w) * sigmas[i - 1] + w * sigmas[i];
    }
};

}  // namespace

SmileSurface generate_smile(const ModelParams& model, const SmileConfig& cfg) {
    std::vector<double> deltas = cfg.deltas;
    if (deltas.empty()) {
        for (int i = 1; i <= 19; ++i) deltas.push_back(0.05 * i);
    }
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] > deltas[i - 1]))
            throw std::invalid_argument("generate_smile: deltas must strictly increase");
    if (!(deltas.front() > 0.0 && deltas.back() < 1.0))
        throw std::invalid_argument("generate_smile: deltas must lie in (0, 1)");

    SmileSurface surface;
    surface.maturities.reserve(cfg.maturities.size());
    for (std::size_t mi = 0; mi < cfg.maturities.size(); ++mi) {
        const double t = cfg.maturities[mi];
        const TimeGrid grid(cfg.n_steps, t);
        TerminalOptions topts;
        topts.antithetic = uses_antithetic(cfg.kind);
        topts.with_full_price = requires_w2(cfg.kind);
        topts.threads = cfg.threads;
        const std::uint64_t mat_seed = seed_for(cfg.seed, kTagMaturity, mi);
        const PathFunctionals pf = simulate_terminals(model, grid, cfg.n_paths, mat_seed, topts);

        // Pass 1: provisional smile on a wide equally spaced strike grid.
        const double vg = model.xi0.integral(t);
        const double k_lo = 2.2 * std::sqrt(vg) * bs::norm_ppf(0.005);
        const double k_hi = 2.2 * std::sqrt(vg) * bs::norm_ppf(0.995);
        InterpolatedSmile prov;
        constexpr int kProvisionalPoints = 31;
        for (int i = 0; i < kProvisionalPoints; ++i) {
            const double k = k_lo + (k_hi - k_lo) * i / double(kProvisionalPoints - 1);
            const bs::OptionSpec spec(k, t);
            const IvEstimate est = estimate_implied_vol(cfg.kind, pf, spec, model.rho);
            if (!est.flagged() && est.sigma > 0.0) {
                prov.ks.push_back(k);
                prov.sigmas.push_back(est.sigma);
            }
        }

        MaturitySmile smile;
        smile.maturity = t;
        smile.points.resize(deltas.size());
        for (std::size_t di = 0; di < deltas.size(); ++di) {
            SmilePoint& pt = smile.points[di];
            pt.delta_put = deltas[di];
            if (prov.ks.size() < 2) {
                pt.flagged = true;
                continue;
            }
            double k;
            try {
                k = bs::logstrike_from_spot_delta(
                    deltas[di], [&](double kk) { return prov(kk); }, t);
            } catch (const std::exception&) {
                pt.flagged = true;
                continue;
            }
            pt.k = k;
            const bs::OptionSpec spec(k, t);
            const EstimatorSample sample = assemble_sample(cfg.kind, pf, spec, model.rho);
            const IvEstimate est = estimate_implied_vol(cfg.kind, pf, spec, model.rho);
            if (est.flagged() || !(est.sigma > 0.0)) {
                pt.flagged = true;
                pt.sigma = est.sigma;
                continue;
            }
            pt.sigma = est.sigma;
            const double se_p = p_hat_standard_error(sample, pf.antithetic);
            const double v = est.sigma * est.sigma * t;
            const double dp_dsigma = bs::bs_vega_total_var(v, 1.0, k) * 2.0 * est.sigma * t;
            pt.std_err = dp_dsigma > 0.0 ? se_p / dp_dsigma
                                         : std::numeric_limits<double>::quiet_NaN();
        }
        surface.maturities.push_back(std::move(smile));
    }
    return surface;
}

DeltaSmile to_delta_space(const MaturitySmile& smile) {
    DeltaSmile out;
    out.maturity = smile.maturity;
    for (const auto& pt : smile.points) {
        if (pt.flagged || !(pt.sigma > 0.0)) continue;
        out.points.push_back({bs::forward_delta(pt.k, pt.sigma, smile.maturity), pt.k, pt.sigma});
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const DeltaPoint& a, const DeltaPoint& b) { return a.delta < b.delta; });
    return out;
}

double extract_forward_variance(const DeltaSmile& smile) {
    if (smile.points.size() < 5)
        throw std::invalid_argument("extract_forward_variance: need at least 5 smile points");
    std::vector<double> x, y;
    x.reserve(smile.points.size());
    y.reserve(smile.points.size());
    for (const auto& pt : smile.points) {
        if (!(pt.delta > 0.0 && pt.delta < 1.0))
            throw std::invalid_argument("extract_forward_variance: delta outside (0, 1)");
        x.push_back(pt.delta);
        y.push_back(pt.sigma * pt.sigma);
    }
    const CubicSpline spline(x, y);
    const double mid = spline.integrate(x.front(), x.back());
    const double integral = y.front() * x.front() + mid + y.back() * (1.0 - x.back());
    return smile.maturity * integral;
}

namespace {

struct Objective {
    const CalibrationTargets& targets;
    const ModelParams& base;
    const CalibrationOptions& opts;
    mutable int evals = 0;

    double operator()(double rho, double eta) const {
        ++evals;
        if (rho < opts.rho_min || rho > opts.rho_max || eta < opts.eta_min || eta > opts.eta_max)
            return std::numeric_limits<double>::infinity();
        const ModelParams model(base.xi0, eta, rho, base.alpha.alpha);
        const TimeGrid grid(opts.n_steps, targets.maturity);
        TerminalOptions topts;
        topts.antithetic = uses_antithetic(opts.kind);
        topts.with_full_price = requires_w2(opts.kind);
        topts.threads = opts.threads;
        const PathFunctionals pf =
            simulate_terminals(model, grid, opts.n_paths, opts.seed, topts);
        double acc = 0.0;
        for (std::size_t i = 0; i < targets.ks.size(); ++i) {
            const bs::OptionSpec spec(targets.ks[i], targets.maturity);
            const IvEstimate est = estimate_implied_vol(opts.kind, pf, spec, rho);
            if (est.flagged()) return std::numeric_limits<double>::infinity();
            const double d = est.sigma - targets.vols[i];
            acc += d * d;
        }
        return std::sqrt(acc / static_cast<double>(targets.ks.size()));
    }
};

}  // namespace

CalibrationResult calibrate_rho_eta(const CalibrationTargets& targets,
                                    const ModelParams& base_model,
                                    const CalibrationOptions& opts) {
    if (targets.ks.size() != targets.vols.size() || targets.ks.empty())
        throw std::invalid_argument("calibrate_rho_eta: bad target smile");

    const Objective objective{targets, base_model, opts};
    const auto t0 = std::chrono::steady_clock::now();
    auto out_of_budget = [&] {
        if (opts.max_evals > 0 && objective.evals >= opts.max_evals) return true;
        if (opts.budget_ms > 0.0) {
            const double ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
            if (ms >= opts.budget_ms) return true;
        }
        return false;
    };

    struct Vertex {
        double rho, eta, f;
    };
    auto eval = [&](double rho, double eta) { return objective(rho, eta); };

    const double drho = std::min(0.05, 0.5 * (opts.rho_max - opts.rho_min));
    const double deta = std::min(0.10, 0.5 * (opts.eta_max - opts.eta_min));
    auto clamp_rho = [&](double r) { return std::clamp(r, opts.rho_min, opts.rho_max); };
    auto clamp_eta = [&](double e) { return std::clamp(e, opts.eta_min, opts.eta_max); };
    const double r0 = clamp_rho(opts.rho_init);
    const double e0 = clamp_eta(opts.eta_init);

    std::array<Vertex, 3> simplex;
    simplex[0] = {r0, e0, eval(r0, e0)};
    const double r1 = clamp_rho(r0 + (r0 + drho <= opts.rho_max ? drho : -drho));
    const double e1 = clamp_eta(e0 + (e0 + deta <= opts.eta_max ? deta : -deta));
    simplex[1] = {r1, e0, eval(r1, e0)};
    simplex[2] = {r0, e1, eval(r0, e1)};

    bool converged = false;
    while (!out_of_budget()) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        const double size = std::max(
            std::abs(simplex[0].rho - simplex[2].rho) + std::abs(simplex[0].eta - simplex[2].eta),
            std::abs(simplex[0].rho - simplex[1].rho) + std::abs(simplex[0].eta - simplex[1].eta));
        if (size < 1e-5) {
            converged = true;
            break;
        }
        const double cr = 0.5 * (simplex[0].rho + simplex[1].rho);
        const double ce = 0.5 * (simplex[0].eta + simplex[1].eta);
        const Vertex& worst = simplex[2];
        Vertex refl{cr + (cr - worst.rho), ce + (ce - worst.eta), 0.0};
        refl.f = eval(refl.rho, refl.eta);
        if (refl.f < simplex[0].f) {
            Vertex expa{cr + 2.0 * (cr - worst.rho), ce + 2.0 * (ce - worst.eta), 0.0};
            expa.f = eval(expa.rho, expa.eta);
            simplex[2] = expa.f < refl.f ? expa : refl;
        } else if (refl.f < simplex[1].f) {
            simplex[2] = refl;
        } else {
            Vertex contr{cr + 0.5 * (worst.rho - cr), ce + 0.5 * (worst.eta - ce), 0.0};
            contr.f = eval(contr.rho, contr.eta);
            if (contr.f < worst.f) {
                simplex[2] = contr;
            } else {
                // shrink toward the best vertex
                for (int i = 1; i < 3; ++i) {
                    simplex[i].rho = simplex[0].rho + 0.5 * (simplex[i].rho - simplex[0].rho);
                    simplex[i].eta = simplex[0].eta + 0.5 * (simplex[i].eta - simplex[0].eta);
                    simplex[i].f = eval(simplex[i].rho, simplex[i].eta);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });

    CalibrationResult res;
    res.rho_hat = simplex[0].rho;
    res.eta_hat = simplex[0].eta;
    res.rmse = simplex[0].f;
    res.iterations = objective.evals;
    res.converged = converged;
    return res;
}

std::vector<CalibrationResult> run_calibration_restarts(const CalibrationTargets& targets,
                                                        const ModelParams& base_model,
                                                        const CalibrationOptions& opts,
                                                        std::size_t n_restarts) {
    std::vector<CalibrationResult> out;
    out.reserve(n_restarts);
    for (std::size_t r = 0; r < n_restarts; ++r) {
        CalibrationOptions o = opts;
        o.seed = seed_for(opts.seed, kTagRestart, r);
        out.push_back(calibrate_rho_eta(targets, base_model, o));
    }
    return out;
}

}  // namespace rbergomi
