#include "rbergomi/hybrid_volterra.hpp"

#include "rbergomi/parallel.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace rbergomi {

std::vector<double> bstar_weights(double alpha, std::size_t count) {
    if (!(alpha > -0.5) || !(alpha < 0.0))
        throw std::invalid_argument("bstar_weights: alpha must be in (-0.5, 0)");
    if (count < 2) throw std::invalid_argument("bstar_weights: count must be >= 2");
    std::vector<double> b;
    b.reserve(count - 1);
    const double ap1 = alpha + 1.0;
    double prev_pow = 1.0;  // 1^(a+1)
    for (std::size_t k = 2; k <= count; ++k) {
        const double cur_pow = std::pow(static_cast<double>(k), ap1);
        b.push_back(std::pow((cur_pow - prev_pow) / ap1, 1.0 / alpha));
        prev_pow = cur_pow;
    }
    return b;
}

KernelPairCovariance kernel_pair_covariance(double alpha, double dt) {
    if (!(alpha > -0.5) || !(alpha < 0.0))
        throw std::invalid_argument("kernel_pair_covariance: alpha must be in (-0.5, 0)");
    if (!(dt > 0.0)) throw std::invalid_argument("kernel_pair_covariance: dt must be > 0");
    KernelPairCovariance c;
    c.var_dw = dt;
    c.var_integral = std::pow(dt, 2.0 * alpha + 1.0) / (2.0 * alpha + 1.0);
    c.cov = std::pow(dt, alpha + 1.0) / (alpha + 1.0);
    return c;
}

double KernelPairCovariance::l11() const { return std::sqrt(var_dw); }
double KernelPairCovariance::l21() const { return cov / std::sqrt(var_dw); }
double KernelPairCovariance::l22() const {
    return std::sqrt(var_integral - cov * cov / var_dw);
}

std::vector<double> direct_convolution_reference(std::span<const double> dw1,
                                                 std::span<const double> weights) {
    std::vector<double> out(dw1.size() + weights.size(), 0.0);
    for (std::size_t i = 0; i < dw1.size(); ++i)
        for (std::size_t m = 0; m < weights.size(); ++m) out[i + m] += weights[m] * dw1[i];
    return out;
}

HybridScheme::HybridScheme(RoughnessParams params, TimeGrid grid, ConvolutionMode mode)
    : alpha_(params.alpha),
      grid_(grid),
      mode_(mode),
      sqrt_coeff_(std::sqrt(2.0 * alpha_ + 1.0)) {
    if (brownian_case()) return;
    const std::size_t n = grid_.n_steps;
    const double dt = grid_.dt();
    chol_[0] = kernel_pair_covariance(alpha_, dt).l11();
    chol_[1] = kernel_pair_covariance(alpha_, dt).l21();
    chol_[2] = kernel_pair_covariance(alpha_, dt).l22();
    // lag_weights_[m] multiplies the increment m steps back, m = 2..n-... the
    // time-i sum uses lags 2..i, so lags up to n are never needed beyond n-1
    // increments of history; index 0 and 1 stay zero.
    lag_weights_.assign(n + 1, 0.0);
    if (n >= 2) {
        const auto b = bstar_weights(alpha_, n);
        for (std::size_t k = 2; k <= n; ++k)
            lag_weights_[k] = std::pow(b[k - 2] * dt, alpha_);
    }
    if (mode_ == ConvolutionMode::Fft && n >= 2)
        convolver_.emplace_back(std::span<const double>(lag_weights_), n, n + 1);
}

void HybridScheme::simulate_base_path(std::uint64_t seed, std::uint64_t path_index,
                                      std::span<double> dw1, std::span<double> walpha,
                                      Scratch& scratch) const {
    const std::size_t n = grid_.n_steps;
    rng::NormalSampler normals(seed, path_index);

    if (brownian_case()) {
        const double sdt = std::sqrt(grid_.dt());
        double acc = 0.0;
        walpha[0] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dw1[i] = sdt * normals.next();
            acc += dw1[i];
            walpha[i + 1] = acc;
        }
        return;
    }

    auto& z = scratch.z;
    auto& exact = scratch.exact;
    auto& conv = scratch.conv;
    z.resize(2 * n);
    exact.resize(n);
    conv.assign(n + 1, 0.0);
    normals.fill(z.data(), 2 * n);
    const double l11 = chol_[0], l21 = chol_[1], l22 = chol_[2];
    for (std::size_t i = 0; i < n; ++i) {
        dw1[i] = l11 * z[2 * i];
        exact[i] = l21 * z[2 * i] + l22 * z[2 * i + 1];
    }

    // History term: conv[i] = sum_{k=2..i} (b_k dt)^a dW_{i-k+1}; increment
    // dW_m lives at dw1[m-1], so the linear-convolution output index is
    // (m-1) + k = i.
    if (n >= 2) {
        if (mode_ == ConvolutionMode::Fft) {
            convolver_[0].convolve(dw1, conv, scratch.fft);
        } else {
            auto full = direct_convolution_reference(dw1, lag_weights_);
            for (std::size_t i = 0; i <= n; ++i) conv[i] = full[i];
        }
    }

    walpha[0] = 0.0;
    walpha[1] = sqrt_coeff_ * exact[0];
    for (std::size_t i = 2; i <= n; ++i)
        walpha[i] = sqrt_coeff_ * (exact[i - 1] + conv[i]);
}

int resolve_threads(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("RVT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0 && n > cap) n = cap;
    }
    return n;
}

VolterraPaths simulate_volterra(RoughnessParams params, const TimeGrid& grid,
                                std::size_t n_paths, std::uint64_t seed,
                                const SimulateOptions& opts) {
    if (n_paths == 0) throw std::invalid_argument("simulate_volterra: n_paths must be > 0");
    if (opts.antithetic && n_paths % 2 != 0)
        throw std::invalid_argument("simulate_volterra: antithetic pairing needs even n_paths");

    const std::size_t n = grid.n_steps;
    VolterraPaths out;
    out.antithetic = opts.antithetic;
    out.dw1 = Matrix(n_paths, n);
    out.walpha = Matrix(n_paths, n + 1);

    const HybridScheme scheme(params, grid, opts.convolution);
    const std::size_t n_base = opts.antithetic ? n_paths / 2 : n_paths;
    const int threads = resolve_threads(opts.threads);

    thread_local HybridScheme::Scratch scratch;
    detail::parallel_over(n_base, threads, 16, [&](std::size_t b) {
        const std::size_t row = opts.antithetic ? 2 * b : b;
        scheme.simulate_base_path(seed, b, out.dw1.row(row), out.walpha.row(row), scratch);
        if (opts.antithetic) {
            auto src_dw = out.dw1.row(row);
            auto src_w = out.walpha.row(row);
            auto neg_dw = out.dw1.row(row + 1);
            auto neg_w = out.walpha.row(row + 1);
            for (std::size_t j = 0; j < n; ++j) neg_dw[j] = -src_dw[j];
            for (std::size_t j = 0; j <= n; ++j) neg_w[j] = -src_w[j];
        }
    });
    return out;
}

}  // namespace rbergomi
