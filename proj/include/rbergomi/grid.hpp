#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rbergomi {

/// Uniform grid with n_steps intervals over [0, maturity]; t_i = i*dt.
struct TimeGrid {
    std::size_t n_steps;
    double maturity;

    TimeGrid(std::size_t steps, double t) : n_steps(steps), maturity(t) {
        if (steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
        if (!(t > 0.0)) throw std::invalid_argument("TimeGrid: maturity must be > 0");
    }

    double dt() const { return maturity / static_cast<double>(n_steps); }
    double time(std::size_t i) const { return static_cast<double>(i) * dt(); }
};

/// Kernel exponent of the Riemann-Liouville process; alpha = 0 is the
/// Brownian degenerate case.
struct RoughnessParams {
    double alpha;

    explicit RoughnessParams(double a) : alpha(a) {
        if (!(a > -0.5) || !(a <= 0.0))
            throw std::invalid_argument("RoughnessParams: alpha must be in (-0.5, 0]");
    }
};

/// Piecewise-constant forward variance curve. Breakpoints split [0, inf) into
/// right-open intervals; values.size() == breakpoints.size() + 1.
class ForwardVarianceCurve {
public:
    ForwardVarianceCurve() : values_{0.235 * 0.235} {}
    explicit ForwardVarianceCurve(double flat_value) : values_{flat_value} { validate(); }
    ForwardVarianceCurve(std::vector<double> breakpoints, std::vector<double> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        if (values_.size() != breakpoints_.size() + 1)
            throw std::invalid_argument("ForwardVarianceCurve: need one more value than breakpoint");
        for (std::size_t i = 1; i < breakpoints_.size(); ++i)
            if (!(breakpoints_[i] > breakpoints_[i - 1]))
                throw std::invalid_argument("ForwardVarianceCurve: breakpoints must increase");
        if (!breakpoints_.empty() && !(breakpoints_.front() > 0.0))
            throw std::invalid_argument("ForwardVarianceCurve: breakpoints must be positive");
        validate();
    }

    double operator()(double t) const {
        std::size_t i = 0;
        while (i < breakpoints_.size() && t >= breakpoints_[i]) ++i;
        return values_[i];
    }

    /// Exact integral over [0, t].
    double integral(double t) const {
        double acc = 0.0, prev = 0.0;
        for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
            if (t <= breakpoints_[i]) break;
            acc += values_[i] * (breakpoints_[i] - prev);
            prev = breakpoints_[i];
        }
        std::size_t i = 0;
        while (i < breakpoints_.size() && t > breakpoints_[i]) ++i;
        if (t > prev) acc += values_[i] * (t - prev);
        return acc;
    }

    bool is_flat() const { return breakpoints_.empty(); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }

private:
    void validate() const {
        for (double v : values_)
            if (!(v > 0.0)) throw std::invalid_argument("ForwardVarianceCurve: values must be > 0");
    }

    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Row-major dense matrix, just enough for path skeletons.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

}  // namespace rbergomi
