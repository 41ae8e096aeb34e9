#include "rbergomi/rbergomi.hpp"

#include "rbergomi/parallel.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rbergomi {

namespace {

// Deterministic-per-grid precomputed factors shared by both evaluation paths.
struct VarianceGridTerms {
    std::vector<double> xi;     // xi0(t_j)
    std::vector<double> drift;  // (eta^2/2) t_j^(2a+1)

    VarianceGridTerms(const ModelParams& p, const TimeGrid& grid) {
        const std::size_t n = grid.n_steps;
        xi.resize(n + 1);
        drift.resize(n + 1);
        const double expo = 2.0 * p.alpha.alpha + 1.0;
        for (std::size_t j = 0; j <= n; ++j) {
            const double t = grid.time(j);
            xi[j] = p.xi0(t);
            drift[j] = j == 0 ? 0.0 : 0.5 * p.eta * p.eta * std::pow(t, expo);
        }
    }
};

inline void variance_row(std::span<const double> walpha, const VarianceGridTerms& terms,
                         double eta, std::span<double> v_out) {
    for (std::size_t j = 0; j < walpha.size(); ++j) {
        const double v = terms.xi[j] * std::exp(eta * walpha[j] - terms.drift[j]);
        if (!std::isfinite(v)) throw std::runtime_error("variance_paths: non-finite variance");
        v_out[j] = v;
    }
}

struct TerminalRow {
    double s;   // NaN when W2 unused
    double s1;
    double iv;
};

// One log-Euler pass over a row; dw2 may be empty.
inline TerminalRow terminal_row(std::span<const double> v, std::span<const double> dw1,
                                std::span<const double> dw2, double rho, double dt) {
    const std::size_t n = dw1.size();
    const double rho_orth = std::sqrt(1.0 - rho * rho);
    double sum_v = 0.0, log_s1 = 0.0, log_s = 0.0;
    const bool full = !dw2.empty();
    for (std::size_t j = 0; j < n; ++j) {
        const double vj = v[j];
        const double sq = std::sqrt(vj);
        sum_v += vj;
        log_s1 += rho * sq * dw1[j] - 0.5 * rho * rho * vj * dt;
        if (full) log_s += sq * (rho * dw1[j] + rho_orth * dw2[j]) - 0.5 * vj * dt;
    }
    TerminalRow out;
    out.iv = sum_v * dt;
    out.s1 = std::exp(log_s1);
    out.s = full ? std::exp(log_s) : std::numeric_limits<double>::quiet_NaN();
    if (!(out.iv > 0.0) || !std::isfinite(out.s1) || (full && !std::isfinite(out.s)))
        throw std::runtime_error("price_functionals: non-finite terminal value");
    return out;
}

}  // namespace

Matrix variance_paths(const VolterraPaths& vp, const ModelParams& params, const TimeGrid& grid) {
    const std::size_t n = grid.n_steps;
    if (vp.walpha.cols() != n + 1)
        throw std::invalid_argument("variance_paths: grid/path shape mismatch");
    const VarianceGridTerms terms(params, grid);
    Matrix v(vp.walpha.rows(), n + 1);
    for (std::size_t i = 0; i < vp.walpha.rows(); ++i)
        variance_row(vp.walpha.row(i), terms, params.eta, v.row(i));
    return v;
}

std::vector<double> integrated_variance(const Matrix& v, const TimeGrid& grid) {
    if (v.cols() != grid.n_steps + 1)
        throw std::invalid_argument("integrated_variance: grid/shape mismatch");
    const double dt = grid.dt();
    std::vector<double> iv(v.rows());
    for (std::size_t i = 0; i < v.rows(); ++i) {
        double acc = 0.0;
        const auto row = v.row(i);
        for (std::size_t j = 0; j < grid.n_steps; ++j) acc += row[j];
        iv[i] = acc * dt;
    }
    return iv;
}

std::uint64_t derive_w2_seed(std::uint64_t seed) {
    return rng::derive_stream(seed, 0x77325eedULL);
}

PathFunctionals price_functionals(const VolterraPaths& vp, const Matrix& v,
                                  const ModelParams& params, const TimeGrid& grid,
                                  std::uint64_t seed2, bool with_full_price) {
    const std::size_t rows = vp.dw1.rows();
    if (v.rows() != rows || vp.dw1.cols() != grid.n_steps)
        throw std::invalid_argument("price_functionals: shape mismatch");
    const double dt = grid.dt();
    PathFunctionals out;
    out.antithetic = vp.antithetic;
    out.s1_t.resize(rows);
    out.iv.resize(rows);
    if (with_full_price) out.s_t.resize(rows);

    std::vector<double> dw2;
    const std::size_t n = grid.n_steps;
    const std::size_t stride = vp.antithetic ? 2 : 1;
    for (std::size_t r = 0; r < rows; r += stride) {
        if (with_full_price) {
            dw2.resize(n);
            rng::NormalSampler normals(seed2, r / stride);
            const double sdt = std::sqrt(dt);
            for (std::size_t j = 0; j < n; ++j) dw2[j] = sdt * normals.next();
        }
        const auto res = terminal_row(v.row(r), vp.dw1.row(r),
                                      with_full_price ? std::span<const double>(dw2)
                                                      : std::span<const double>(),
                                      params.rho, dt);
        out.s1_t[r] = res.s1;
        out.iv[r] = res.iv;
        if (with_full_price) out.s_t[r] = res.s;
        if (vp.antithetic) {
            for (double& x : dw2) x = -x;
            const auto neg = terminal_row(v.row(r + 1), vp.dw1.row(r + 1),
                                          with_full_price ? std::span<const double>(dw2)
                                                          : std::span<const double>(),
                                          params.rho, dt);
            out.s1_t[r + 1] = neg.s1;
            out.iv[r + 1] = neg.iv;
            if (with_full_price) out.s_t[r + 1] = neg.s;
        }
    }
    return out;
}

PathFunctionals simulate_terminals(const ModelParams& params, const TimeGrid& grid,
                                   std::size_t n_paths, std::uint64_t seed,
                                   const TerminalOptions& opts) {
    if (n_paths == 0) throw std::invalid_argument("simulate_terminals: n_paths must be > 0");
    if (opts.antithetic && n_paths % 2 != 0)
        throw std::invalid_argument("simulate_terminals: antithetic pairing needs even n_paths");

    const std::size_t n = grid.n_steps;
    const HybridScheme scheme(params.alpha, grid, opts.convolution);
    const VarianceGridTerms terms(params, grid);
    const std::uint64_t seed2 = derive_w2_seed(seed);
    const double dt = grid.dt();
    const std::size_t n_base = opts.antithetic ? n_paths / 2 : n_paths;
    const int threads = resolve_threads(opts.threads);

    PathFunctionals out;
    out.antithetic = opts.antithetic;
    out.s1_t.resize(n_paths);
    out.iv.resize(n_paths);
    if (opts.with_full_price) out.s_t.resize(n_paths);

    struct RowScratch {
        HybridScheme::Scratch hybrid;
        std::vector<double> dw1, walpha, wneg, v, dw2;
    };
    thread_local RowScratch rs;

    detail::parallel_over(n_base, threads, 16, [&](std::size_t b) {
        rs.dw1.resize(n);
        rs.walpha.resize(n + 1);
        rs.v.resize(n + 1);
        scheme.simulate_base_path(seed, b, rs.dw1, rs.walpha, rs.hybrid);
        std::span<const double> dw2_span;
        if (opts.with_full_price) {
            rs.dw2.resize(n);
            rng::NormalSampler normals(seed2, b);
            const double sdt = std::sqrt(dt);
            for (std::size_t j = 0; j < n; ++j) rs.dw2[j] = sdt * normals.next();
            dw2_span = rs.dw2;
        }

        variance_row(rs.walpha, terms, params.eta, rs.v);
        const std::size_t row = opts.antithetic ? 2 * b : b;
        const auto res = terminal_row(rs.v, rs.dw1, dw2_span, params.rho, dt);
        out.s1_t[row] = res.s1;
        out.iv[row] = res.iv;
        if (opts.with_full_price) out.s_t[row] = res.s;

        if (opts.antithetic) {
            rs.wneg.resize(n + 1);
            for (std::size_t j = 0; j <= n; ++j) rs.wneg[j] = -rs.walpha[j];
            for (double& x : rs.dw1) x = -x;
            if (opts.with_full_price)
                for (double& x : rs.dw2) x = -x;
            variance_row(rs.wneg, terms, params.eta, rs.v);
            const auto neg = terminal_row(rs.v, rs.dw1, dw2_span, params.rho, dt);
            out.s1_t[row + 1] = neg.s1;
            out.iv[row + 1] = neg.iv;
            if (opts.with_full_price) out.s_t[row + 1] = neg.s;
        }
    });
    return out;
}

}  // namespace rbergomi
