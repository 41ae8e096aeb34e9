#include <doctest.h>

#include <cmath>
#include <vector>

#include "rbergomi/experiment.hpp"
#include "rbergomi/spline.hpp"

using namespace rbergomi;

TEST_SUITE_BEGIN("experiment");

namespace {

ModelParams flat_model(double rho, double eta = 1.9, double alpha = -0.43) {
    return ModelParams(ForwardVarianceCurve(0.235 * 0.235), eta, rho, alpha);
}

}  // namespace

TEST_CASE("error measures") {
    SUBCASE("samples equal to targets give zero error") {
        StrikeStats st;
        st.spec = {"ATM", 0.0, 0.2};
        st.sigmas = {0.2, 0.2, 0.2};
        st.mse_vs_target = 0.0;
        const auto [phi2, psi2] = error_measures({st}, 55.0);
        CHECK(phi2 == 0.0);
        CHECK(psi2 == 0.0);
    }
    SUBCASE("balanced +-c sample has the (N-1) normalisation") {
        const double c = 0.004;
        const std::size_t big_n = 10;
        StrikeStats st;
        st.spec = {"ATM", 0.0, 0.2};
        double mse = 0.0;
        for (std::size_t i = 0; i < big_n; ++i) {
            st.sigmas.push_back(i % 2 == 0 ? 0.2 + c : 0.2 - c);
            mse += c * c;
        }
        st.mse_vs_target = mse / double(big_n - 1);
        const auto [phi2, psi2] = error_measures({st}, 70.0);
        CHECK(phi2 == doctest::Approx(c * c * double(big_n) / double(big_n - 1)).epsilon(1e-12));
        CHECK(psi2 == doctest::Approx(70.0 * phi2).epsilon(1e-12));
    }
    SUBCASE("psi2 / phi2 is exactly tau") {
        StrikeStats st;
        st.spec = {"10P", -0.1, 0.25};
        st.sigmas = {0.24, 0.26};
        st.mse_vs_target = 2e-4;
        const auto [phi2, psi2] = error_measures({st}, 42.0);
        CHECK(psi2 / phi2 == doctest::Approx(42.0).epsilon(1e-15));
    }
}

TEST_CASE("repeated estimation: structure and determinism") {
    RepeatedConfig cfg{flat_model(-0.9), 0.25, 64, 800, 10,
                       default_benchmark_strikes(-0.9), 4242, 0};
    const auto a = repeated_estimation(EstimatorKind::Mixed, cfg);
    REQUIRE(a.per_strike.size() == 3);
    for (const auto& st : a.per_strike) {
        CHECK(st.sigmas.size() + st.n_flagged == cfg.n_reps);
        CHECK(st.stddev > 0.0);
        CHECK(std::abs(st.bias) < 0.1);
    }
    CHECK(a.tau_ms > 0.0);
    CHECK(a.psi2 == doctest::Approx(a.tau_ms * a.phi2).epsilon(1e-15));

    const auto b = repeated_estimation(EstimatorKind::Mixed, cfg);
    for (std::size_t j = 0; j < 3; ++j) {
        REQUIRE(a.per_strike[j].sigmas.size() == b.per_strike[j].sigmas.size());
        for (std::size_t r = 0; r < a.per_strike[j].sigmas.size(); ++r)
            CHECK(a.per_strike[j].sigmas[r] == b.per_strike[j].sigmas[r]);
    }
}

TEST_CASE("repeated estimation: thread count does not change the samples") {
    RepeatedConfig cfg{flat_model(0.0), 0.25, 32, 500, 6,
                       default_benchmark_strikes(0.0), 7, 0};
    cfg.threads = 1;
    const auto one = repeated_estimation(EstimatorKind::Conditional, cfg);
    cfg.threads = 4;
    const auto four = repeated_estimation(EstimatorKind::Conditional, cfg);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t r = 0; r < one.per_strike[j].sigmas.size(); ++r)
            CHECK(one.per_strike[j].sigmas[r] == four.per_strike[j].sigmas[r]);
}

TEST_CASE("psi2 is stable under doubled path counts") {
    // tau scales like n while phi2 scales like 1/n, so psi2 barely moves
    auto run = [&](std::size_t n_paths) {
        RepeatedConfig cfg{flat_model(-0.9), 0.25, 312, n_paths, 400,
                           default_benchmark_strikes(-0.9), 99, 0};
        return repeated_estimation(EstimatorKind::Mixed, cfg).psi2;
    };
    const double small = run(800);
    const double big = run(1600);
    CHECK(std::abs(big / small - 1.0) <= 0.30);
}

TEST_CASE("degenerate model produces a flat smile at sqrt(xi0)") {
    // alpha = 0, eta -> 0: Black-Scholes with sigma = 0.235
    const ModelParams model(ForwardVarianceCurve(0.235 * 0.235), 1e-8, 0.0, 0.0);
    SmileConfig cfg;
    cfg.maturities = {0.25, 1.0};
    cfg.n_paths = 4000;
    cfg.n_steps = 32;
    cfg.seed = 9;
    const auto surface = generate_smile(model, cfg);
    REQUIRE(surface.maturities.size() == 2);
    for (const auto& smile : surface.maturities) {
        REQUIRE(smile.points.size() == 19);
        for (const auto& pt : smile.points) {
            REQUIRE(!pt.flagged);
            CHECK(pt.sigma == doctest::Approx(0.235).epsilon(2e-3));
        }
        // ATM-delta strike sits at sigma^2 t / 2 for a flat smile
        CHECK(smile.points[9].delta_put == doctest::Approx(0.5));
        CHECK(smile.points[9].k ==
              doctest::Approx(0.235 * 0.235 * smile.maturity / 2.0).epsilon(1e-4));
    }
}

TEST_CASE("smile deltas must increase and stay inside (0,1)") {
    SmileConfig cfg;
    cfg.deltas = {0.5, 0.4};
    CHECK_THROWS_AS(generate_smile(flat_model(0.0), cfg), std::invalid_argument);
    cfg.deltas = {0.0, 0.5};
    CHECK_THROWS_AS(generate_smile(flat_model(0.0), cfg), std::invalid_argument);
}

TEST_CASE("delta-space transform is monotone and round-trips") {
    MaturitySmile smile;
    smile.maturity = 0.25;
    for (double k : {-0.2, -0.1, 0.0, 0.1, 0.2}) {
        SmilePoint pt;
        pt.k = k;
        pt.sigma = 0.2 - 0.1 * k;
        pt.delta_put = 0.5;
        smile.points.push_back(pt);
    }
    const auto ds = to_delta_space(smile);
    REQUIRE(ds.points.size() == 5);
    for (std::size_t i = 0; i + 1 < ds.points.size(); ++i)
        CHECK(ds.points[i].delta < ds.points[i + 1].delta);

    // round trip: recover k from delta by bisection on forward_delta
    for (const auto& pt : ds.points) {
        double lo = -1.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double sig = 0.2 - 0.1 * mid;
            if (bs::forward_delta(mid, sig, smile.maturity) < pt.delta) lo = mid;
            else hi = mid;
        }
        CHECK(std::abs(0.5 * (lo + hi) - pt.k) < 1e-10);
    }
}

TEST_CASE("cubic spline: interpolation and exact quadrature") {
    // spline through y = x^2 integrates close to 1/3 on [0,1]
    std::vector<double> x, y;
    for (int i = 0; i <= 10; ++i) {
        x.push_back(i / 10.0);
        y.push_back(x.back() * x.back());
    }
    const CubicSpline s(x, y);
    for (double q : {0.05, 0.33, 0.77}) CHECK(s(q) == doctest::Approx(q * q).epsilon(2e-3));
    CHECK(s.integrate(0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-3));

    // trapezoid oracle on a dense grid
    double trap = 0.0;
    const int steps = 20000;
    for (int i = 0; i < steps; ++i) {
        const double a = double(i) / steps, b = double(i + 1) / steps;
        trap += 0.5 * (s(a) + s(b)) / steps;
    }
    CHECK(s.integrate(0.0, 1.0) == doctest::Approx(trap).epsilon(1e-9));
}

TEST_CASE("forward variance extraction") {
    SUBCASE("flat smile is exact at any maturity") {
        for (double t : {0.25, 1.0}) {
            DeltaSmile smile;
            smile.maturity = t;
            for (double d : {0.1, 0.3, 0.5, 0.7, 0.9}) smile.points.push_back({d, 0.0, 0.2});
            CHECK(extract_forward_variance(smile) == doctest::Approx(0.04 * t).epsilon(1e-14));
        }
    }
    SUBCASE("homogeneity: scaling vols by c scales the output by c^2") {
        DeltaSmile smile;
        smile.maturity = 0.5;
        double d = 0.08;
        for (double sig : {0.31, 0.27, 0.22, 0.24, 0.26, 0.33}) {
            smile.points.push_back({d, 0.0, sig});
            d += 0.15;
        }
        const double base = extract_forward_variance(smile);
        for (auto& pt : smile.points) pt.sigma *= 1.7;
        CHECK(extract_forward_variance(smile) == doctest::Approx(1.7 * 1.7 * base).epsilon(1e-12));
    }
    SUBCASE("too few points are rejected") {
        DeltaSmile smile;
        smile.maturity = 0.25;
        for (double d : {0.2, 0.4, 0.6, 0.8}) smile.points.push_back({d, 0.0, 0.2});
        CHECK_THROWS_AS(extract_forward_variance(smile), std::invalid_argument);
    }
    SUBCASE("Fubini oracle on a simulated rho = 0 smile") {
        SmileConfig cfg;
        cfg.maturities = {0.25};
        cfg.deltas = {0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5,
                      0.6,   0.7,   0.8,  0.9,  0.95, 0.98, 0.99, 0.995, 0.998};
        cfg.n_paths = 40000;
        cfg.seed = 2222;
        const auto model = flat_model(0.0);
        const auto surface = generate_smile(model, cfg);
        const auto ds = to_delta_space(surface.maturities[0]);
        REQUIRE(ds.points.size() >= 15);
        const double estimate = extract_forward_variance(ds);
        CHECK(estimate == doctest::Approx(0.235 * 0.235 * 0.25).epsilon(0.03));
    }
}

TEST_CASE("calibration: noise-free objective stays at the initial point") {
    // targets produced by the same estimator, seed and n as the objective:
    // common random numbers make the initial RMSE exactly zero
    const auto model = flat_model(-0.9);
    CalibrationOptions opts;
    opts.n_paths = 400;
    opts.n_steps = 64;
    opts.seed = 31415;
    opts.max_evals = 60;
    opts.budget_ms = 0.0;
    opts.rho_init = -0.9;
    opts.eta_init = 1.9;

    CalibrationTargets targets;
    targets.maturity = 0.25;
    TerminalOptions topts;
    topts.antithetic = true;
    topts.with_full_price = false;
    const auto pf =
        simulate_terminals(model, TimeGrid(opts.n_steps, 0.25), opts.n_paths, opts.seed, topts);
    for (double k : {-0.15, -0.05, 0.0, 0.05, 0.15}) {
        const auto est = estimate_implied_vol(EstimatorKind::Mixed, pf, bs::OptionSpec(k, 0.25),
                                              model.rho);
        targets.ks.push_back(k);
        targets.vols.push_back(est.sigma);
    }

    const auto res = calibrate_rho_eta(targets, model, opts);
    CHECK(res.rho_hat == doctest::Approx(-0.9).epsilon(1e-9));
    CHECK(res.eta_hat == doctest::Approx(1.9).epsilon(1e-9));
    CHECK(res.rmse == 0.0);
    CHECK(res.method == "nelder-mead");
}

TEST_CASE("calibration: deterministic for a fixed seed and eval cap") {
    const auto model = flat_model(0.0);
    CalibrationTargets targets;
    targets.maturity = 0.25;
    targets.ks = {-0.15, -0.05, 0.0, 0.05, 0.15};
    targets.vols = {0.243, 0.228, 0.2173, 0.221, 0.235};
    CalibrationOptions opts;
    opts.n_paths = 300;
    opts.n_steps = 32;
    opts.seed = 5;
    opts.max_evals = 25;
    opts.budget_ms = 0.0;
    opts.rho_init = 0.0;
    opts.eta_init = 1.9;
    const auto a = calibrate_rho_eta(targets, model, opts);
    const auto b = calibrate_rho_eta(targets, model, opts);
    CHECK(a.rho_hat == b.rho_hat);
    CHECK(a.eta_hat == b.eta_hat);
    CHECK(a.rmse == b.rmse);
    CHECK(a.iterations == b.iterations);
    CHECK(a.rho_hat >= opts.rho_min);
    CHECK(a.rho_hat <= opts.rho_max);
    CHECK(a.eta_hat >= opts.eta_min);
    CHECK(a.eta_hat <= opts.eta_max);
}

TEST_CASE("calibration restarts vary only through the estimator seed") {
    const auto model = flat_model(0.0);
    CalibrationTargets targets;
    targets.maturity = 0.25;
    targets.ks = {-0.1, 0.0, 0.1};
    targets.vols = {0.231, 0.2173, 0.228};
    CalibrationOptions opts;
    opts.n_paths = 200;
    opts.n_steps = 32;
    opts.seed = 17;
    opts.max_evals = 15;
    opts.budget_ms = 0.0;
    opts.rho_init = 0.0;
    opts.eta_init = 1.9;
    const auto runs = run_calibration_restarts(targets, model, opts, 3);
    REQUIRE(runs.size() == 3);
    CHECK((runs[0].eta_hat != runs[1].eta_hat || runs[0].rho_hat != runs[1].rho_hat));
}

TEST_SUITE_END();
