#pragma once

#include <cstdint>
#include <vector>

#include "rbergomi/grid.hpp"
#include "rbergomi/hybrid_volterra.hpp"

namespace rbergomi {

struct ModelParams {
    ForwardVarianceCurve xi0;
    double eta;
    double rho;
    RoughnessParams alpha;

    ModelParams(ForwardVarianceCurve curve, double eta_, double rho_, double alpha_)
        : xi0(std::move(curve)), eta(eta_), rho(rho_), alpha(alpha_) {
        if (!(eta > 0.0)) throw std::invalid_argument("ModelParams: eta must be > 0");
        if (!(rho >= -1.0 && rho <= 1.0))
            throw std::invalid_argument("ModelParams: rho must be in [-1, 1]");
    }
};

/// Terminal quantities per path: full price S_t, parallel price S1_t and the
/// left-endpoint integrated variance. s_t stays empty for estimators that
/// never consume W2.
struct PathFunctionals {
    std::vector<double> s_t;
    std::vector<double> s1_t;
    std::vector<double> iv;
    bool antithetic = false;

    std::size_t n_rows() const { return s1_t.size(); }
    bool has_full_price() const { return !s_t.empty(); }
};

/// V[i][j] = xi0(t_j) exp(eta*walpha[i][j] - (eta^2/2) t_j^(2a+1)).
Matrix variance_paths(const VolterraPaths& vp, const ModelParams& params, const TimeGrid& grid);

/// Left-endpoint Riemann sum of each variance row.
std::vector<double> integrated_variance(const Matrix& v, const TimeGrid& grid);

/// Log-Euler terminal functionals. W2 increments come from substreams of
/// seed2 (one per base path; antithetic rows reuse the negated increments)
/// and are only drawn when with_full_price is set.
PathFunctionals price_functionals(const VolterraPaths& vp, const Matrix& v,
                                  const ModelParams& params, const TimeGrid& grid,
                                  std::uint64_t seed2, bool with_full_price = true);

struct TerminalOptions {
    bool antithetic = true;
    bool with_full_price = true;
    ConvolutionMode convolution = ConvolutionMode::Fft;
    int threads = 0;
};

/// Fused batch runner: streams Volterra -> variance -> terminal functionals
/// one base path at a time, so the full skeleton matrices never materialise.
/// Bit-identical to composing the module operations above with the same
/// seeds. seed2 (the W2 substream key) is derived from seed internally.
PathFunctionals simulate_terminals(const ModelParams& params, const TimeGrid& grid,
                                   std::size_t n_paths, std::uint64_t seed,
                                   const TerminalOptions& opts = {});

/// The W2 substream key used by simulate_terminals.
std::uint64_t derive_w2_seed(std::uint64_t seed);

}  // namespace rbergomi
