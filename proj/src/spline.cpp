#include "rbergomi/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbergomi {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n < 3) throw std::invalid_argument("CubicSpline: need at least 3 points");
    if (y_.size() != n) throw std::invalid_argument("CubicSpline: x/y size mismatch");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("CubicSpline: x must strictly increase");

    // Tridiagonal solve for natural boundary conditions (m_0 = m_{n-1} = 0).
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    diag[0] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    diag[n - 1] = 1.0;
    // forward sweep (lower diagonal of row i is h0 = x_i - x_{i-1})
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double w = h0 / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t ir = n - 1; ir-- > 1;) {
        m_[ir] = (rhs[ir] - upper[ir] * m_[ir + 1]) / diag[ir];
    }
}

double CubicSpline::operator()(double xq) const {
    const std::size_t n = x_.size();
    if (xq <= x_.front()) xq = x_.front();
    if (xq >= x_.back()) xq = x_.back();
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin();
    if (i == 0) i = 1;
    if (i >= n) i = n - 1;
    const std::size_t lo = i - 1;
    const double h = x_[i] - x_[lo];
    const double a = (x_[i] - xq) / h;
    const double b = (xq - x_[lo]) / h;
    return a * y_[lo] + b * y_[i] +
           ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[i]) * h * h / 6.0;
}

double CubicSpline::segment_integral(std::size_t i, double from, double to) const {
    // antiderivative over segment [x_i, x_{i+1}] in local coordinates
    const double h = x_[i + 1] - x_[i];
    auto anti = [&](double xq) {
        const double a = (x_[i + 1] - xq) / h;
        const double b = (xq - x_[i]) / h;
        // d/dx a = -1/h, d/dx b = 1/h
        const double term_lin = h * (-a * a * y_[i] + b * b * y_[i + 1]) / 2.0;
        const double quart = (-(a * a * a * a - 2.0 * a * a) * m_[i] +
                              (b * b * b * b - 2.0 * b * b) * m_[i + 1]) *
                             h * h * h / 24.0;
        return term_lin + quart;
    };
    return anti(to) - anti(from);
}

double CubicSpline::integrate(double a, double b) const {
    if (b < a) return -integrate(b, a);
    a = std::clamp(a, x_.front(), x_.back());
    b = std::clamp(b, x_.front(), x_.back());
    if (a == b) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        const double lo = std::max(a, x_[i]);
        const double hi = std::min(b, x_[i + 1]);
        if (hi > lo) acc += segment_integral(i, lo, hi);
    }
    return acc;
}

}  // namespace rbergomi
