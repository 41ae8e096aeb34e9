#include <doctest.h>

#include <cmath>
#include <vector>

#include "rbergomi/hybrid_volterra.hpp"
#include "rbergomi/rng.hpp"

using namespace rbergomi;

TEST_SUITE_BEGIN("hybrid_volterra");

namespace {

// variance of the terminal skeleton value over all paths
double terminal_sample_variance(const VolterraPaths& paths) {
    const std::size_t n = paths.walpha.rows();
    const std::size_t last = paths.walpha.cols() - 1;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += paths.walpha(i, last);
    mean /= double(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = paths.walpha(i, last) - mean;
        var += d * d;
    }
    return var / double(n - 1);
}

}  // namespace

TEST_CASE("bstar closed form") {
    // independent arithmetic for b_2 at alpha = -0.43
    const double alpha = -0.43;
    const double b2_oracle = std::pow((std::pow(2.0, 0.57) - 1.0) / 0.57, 1.0 / alpha);
    const auto b = bstar_weights(alpha, 2);
    REQUIRE(b.size() == 1);
    CHECK(b[0] == doctest::Approx(b2_oracle).epsilon(1e-14));
    CHECK(b[0] == doctest::Approx(1.4585).epsilon(1e-3));
}

TEST_CASE("bstar weights are mean-value abscissae: k-1 < b_k < k") {
    for (double alpha : {-0.49, -0.43, -0.2, -0.05}) {
        const auto b = bstar_weights(alpha, 312);
        REQUIRE(b.size() == 311);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double k = double(i + 2);
            CHECK(b[i] > k - 1.0);
            CHECK(b[i] < k);
            if (i > 0) CHECK(b[i] > b[i - 1]);  // strictly increasing, brute force
        }
    }
}

TEST_CASE("bstar rejects the degenerate and out-of-range exponents") {
    CHECK_THROWS_AS(bstar_weights(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(bstar_weights(-0.5, 10), std::invalid_argument);
    CHECK_THROWS_AS(bstar_weights(-0.7, 10), std::invalid_argument);
    CHECK_THROWS_AS(bstar_weights(-0.43, 1), std::invalid_argument);
}

TEST_CASE("kernel pair covariance closed forms") {
    const double dt = 1.0 / 312.0;
    const auto cov = kernel_pair_covariance(-0.43, dt);
    CHECK(cov.var_dw == dt);
    CHECK(cov.var_integral == doctest::Approx(3.1966149125800376).epsilon(1e-14));
    CHECK(cov.cov == doctest::Approx(std::pow(dt, 0.57) / 0.57).epsilon(1e-14));

    // Ito isometry oracle: integrate (dt-s)^(2a) by substitution u = e^y,
    // which removes the endpoint singularity; the exact tail below the
    // truncation point is (2a+1)^-1 e^((2a+1) y_lo).
    const double a = -0.43;
    const double y_hi = std::log(dt);
    const double y_lo = y_hi - 80.0;
    const int steps = 200000;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double y = y_lo + (y_hi - y_lo) * i / double(steps);
        const double f = std::exp((2.0 * a + 1.0) * y);
        acc += (i == 0 || i == steps) ? 0.5 * f : f;
    }
    acc *= (y_hi - y_lo) / steps;
    acc += std::exp((2.0 * a + 1.0) * y_lo) / (2.0 * a + 1.0);
    CHECK(cov.var_integral == doctest::Approx(acc).epsilon(1e-8));
}

TEST_CASE("kernel pair covariance tends to the Brownian matrix as alpha -> 0") {
    const double dt = 0.01;
    const auto cov = kernel_pair_covariance(-1e-9, dt);
    CHECK(cov.var_integral == doctest::Approx(dt).epsilon(1e-6));
    CHECK(cov.cov == doctest::Approx(dt).epsilon(1e-6));
}

TEST_CASE("kernel pair covariance is strictly positive definite") {
    for (double alpha : {-0.49, -0.43, -0.25, -0.01}) {
        for (double dt : {1e-5, 1.0 / 312.0, 0.05, 1.0}) {
            const auto cov = kernel_pair_covariance(alpha, dt);
            CHECK(cov.cov * cov.cov < cov.var_dw * cov.var_integral);  // strict Cauchy-Schwarz
            CHECK(cov.l22() > 0.0);
        }
    }
    CHECK_THROWS_AS(kernel_pair_covariance(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(kernel_pair_covariance(-0.43, 0.0), std::invalid_argument);
}

TEST_CASE("direct convolution reference basics") {
    std::vector<double> dw{1.0, 2.0, -1.0, 0.5};

    std::vector<double> zeros(5, 0.0);
    for (double v : direct_convolution_reference(dw, zeros)) CHECK(v == 0.0);

    std::vector<double> delta_kernel{0.0, 0.0, 0.75};  // single weight at lag 2
    const auto out = direct_convolution_reference(dw, delta_kernel);
    for (std::size_t i = 0; i < dw.size(); ++i)
        CHECK(out[i + 2] == doctest::Approx(0.75 * dw[i]).epsilon(1e-15));
}

TEST_CASE("degenerate alpha = 0 is exactly cumulative Brownian sums") {
    const TimeGrid grid(64, 0.5);
    const auto paths = simulate_volterra(RoughnessParams(0.0), grid, 16, 99, {});
    for (std::size_t i = 0; i < paths.walpha.rows(); ++i) {
        double acc = 0.0;
        CHECK(paths.walpha(i, 0) == 0.0);
        for (std::size_t j = 0; j < grid.n_steps; ++j) {
            acc += paths.dw1(i, j);
            CHECK(paths.walpha(i, j + 1) == acc);  // bitwise: same accumulation
        }
    }
}

TEST_CASE("antithetic rows are exact negations") {
    const TimeGrid grid(32, 0.25);
    const auto paths = simulate_volterra(RoughnessParams(-0.43), grid, 64, 5, {});
    REQUIRE(paths.antithetic);
    for (std::size_t i = 0; i < paths.walpha.rows(); i += 2) {
        for (std::size_t j = 0; j < paths.dw1.cols(); ++j)
            CHECK(paths.dw1(i + 1, j) == -paths.dw1(i, j));
        for (std::size_t j = 0; j < paths.walpha.cols(); ++j)
            CHECK(paths.walpha(i + 1, j) == -paths.walpha(i, j));
    }
    CHECK_THROWS_AS(simulate_volterra(RoughnessParams(-0.43), grid, 7, 5, {}),
                    std::invalid_argument);
}

TEST_CASE("marginal law: variance matches t^(2a+1)") {
    const std::size_t n_paths = 50000;
    for (double alpha : {-0.43, -0.2}) {
        for (double t : {0.25, 1.0}) {
            const TimeGrid grid(312, t);
            const auto paths =
                simulate_volterra(RoughnessParams(alpha), grid, n_paths, 20260808, {});
            const double target = std::pow(t, 2.0 * alpha + 1.0);
            const double var = terminal_sample_variance(paths);
            // 3 standard errors of the variance estimator ~ 3 var sqrt(2/n)
            const double tol = 3.0 * target * std::sqrt(2.0 / double(n_paths));
            CHECK(std::abs(var - target) < tol);
        }
    }
}

TEST_CASE("sample mean of the skeleton is zero") {
    const TimeGrid grid(128, 0.5);
    const auto paths = simulate_volterra(RoughnessParams(-0.3), grid, 40000, 31, {});
    const std::size_t last = paths.walpha.cols() - 1;
    double mean = 0.0;
    for (std::size_t i = 0; i < paths.walpha.rows(); ++i) mean += paths.walpha(i, last);
    mean /= double(paths.walpha.rows());
    CHECK(mean == 0.0);  // antithetic pairing cancels exactly
}

TEST_CASE("FFT path equals naive convolution path") {
    for (std::size_t n_steps : {32u, 128u}) {
        const TimeGrid grid(n_steps, 0.25);
        SimulateOptions fft_opts, direct_opts;
        direct_opts.convolution = ConvolutionMode::Direct;
        const auto a = simulate_volterra(RoughnessParams(-0.43), grid, 32, 77, fft_opts);
        const auto b = simulate_volterra(RoughnessParams(-0.43), grid, 32, 77, direct_opts);
        for (std::size_t i = 0; i < a.walpha.rows(); ++i)
            for (std::size_t j = 0; j < a.walpha.cols(); ++j)
                CHECK(a.walpha(i, j) == doctest::Approx(b.walpha(i, j)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("determinism: same inputs, same skeleton, any thread count") {
    const TimeGrid grid(64, 0.25);
    SimulateOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = simulate_volterra(RoughnessParams(-0.35), grid, 256, 123, one);
    const auto b = simulate_volterra(RoughnessParams(-0.35), grid, 256, 123, four);
    for (std::size_t i = 0; i < a.walpha.rows(); ++i)
        for (std::size_t j = 0; j < a.walpha.cols(); ++j)
            CHECK(a.walpha(i, j) == b.walpha(i, j));
    // different seed must change the draw
    const auto c = simulate_volterra(RoughnessParams(-0.35), grid, 256, 124, one);
    CHECK(c.walpha(0, 1) != a.walpha(0, 1));
}

TEST_SUITE_END();
