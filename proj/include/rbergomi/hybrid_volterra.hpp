#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbergomi/fft.hpp"
#include "rbergomi/grid.hpp"
#include "rbergomi/rng.hpp"

namespace rbergomi {

/// Simulated skeletons of (W1 increments, Volterra process) on a uniform
/// grid. Rows are paths; when antithetic, row 2j+1 is the exact negation of
/// row 2j in both matrices.
struct VolterraPaths {
    Matrix dw1;     // [paths x n_steps]
    Matrix walpha;  // [paths x (n_steps+1)], column 0 identically 0
    bool antithetic = false;
};

/// Optimal power-kernel abscissae b_k for k = 2..count:
/// b_k = ((k^(a+1) - (k-1)^(a+1)) / (a+1))^(1/a).
/// Requires alpha in (-0.5, 0) strictly; the Brownian case has no weights.
std::vector<double> bstar_weights(double alpha, std::size_t count);

/// Covariance of the step pair (Brownian increment, exact kernel integral
/// over the most recent interval):
///   Var[dW] = dt, Var[I] = dt^(2a+1)/(2a+1), Cov = dt^(a+1)/(a+1).
struct KernelPairCovariance {
    double var_dw;
    double var_integral;
    double cov;

    // lower Cholesky factor
    double l11() const;
    double l21() const;
    double l22() const;
};
KernelPairCovariance kernel_pair_covariance(double alpha, double dt);

/// Naive O(n^2) discrete convolution, out[i] = sum_m weights[m]*dw1[i-m].
/// Test oracle for the FFT path.
std::vector<double> direct_convolution_reference(std::span<const double> dw1,
                                                 std::span<const double> weights);

enum class ConvolutionMode { Fft, Direct };

struct SimulateOptions {
    bool antithetic = true;
    ConvolutionMode convolution = ConvolutionMode::Fft;
    int threads = 0;  // 0 = auto (hardware, capped by RVT_THREADS)
};

/// Reusable per-grid state for the first-order hybrid scheme: the b_k lag
/// weights (b_k*dt)^alpha, the 2x2 Cholesky of the step pair, and the FFT
/// plan for the history convolution.
class HybridScheme {
public:
    HybridScheme(RoughnessParams params, TimeGrid grid,
                 ConvolutionMode mode = ConvolutionMode::Fft);

    const TimeGrid& grid() const { return grid_; }
    double alpha() const { return alpha_; }
    bool brownian_case() const { return alpha_ == 0.0; }
    std::span<const double> lag_weights() const { return lag_weights_; }

    struct Scratch {
        std::vector<double> z;      // 2*n_steps normal draws
        std::vector<double> exact;  // n_steps exact kernel integrals
        std::vector<double> conv;   // n_steps+1 convolution values
        FftConvolver::Scratch fft;
    };

    /// Simulate one base path from its own substream (stream id = base path
    /// index): fills dw1 (n_steps) and walpha (n_steps+1, walpha[0] = 0).
    void simulate_base_path(std::uint64_t seed, std::uint64_t path_index,
                            std::span<double> dw1, std::span<double> walpha,
                            Scratch& scratch) const;

private:
    double alpha_;
    TimeGrid grid_;
    ConvolutionMode mode_;
    double sqrt_coeff_;  // sqrt(2a+1)
    double chol_[3];     // l11, l21, l22
    std::vector<double> lag_weights_;  // index m >= 2: (b_m*dt)^alpha
    std::vector<FftConvolver> convolver_;  // empty in the Brownian case
};

/// Hybrid-scheme simulation of n_paths skeletons; n_paths must be even when
/// antithetic. Paths are deterministic functions of (seed, path index) alone,
/// so results do not depend on threading.
VolterraPaths simulate_volterra(RoughnessParams params, const TimeGrid& grid,
                                std::size_t n_paths, std::uint64_t seed,
                                const SimulateOptions& opts = {});

/// Worker count: explicit requested value, else hardware concurrency, both
/// capped by the RVT_THREADS environment variable when it is set (> 0).
int resolve_threads(int requested);

}  // namespace rbergomi
