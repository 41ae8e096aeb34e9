#pragma once

#include <span>
#include <vector>

namespace rbergomi {

/// Natural cubic spline with exact piecewise-polynomial quadrature.
class CubicSpline {
public:
    CubicSpline(std::span<const double> x, std::span<const double> y);

    double operator()(double x) const;

    /// Exact integral over [a, b]; arguments clamped to the knot range.
    double integrate(double a, double b) const;

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

private:
    double segment_integral(std::size_t i, double from, double to) const;

    std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

}  // namespace rbergomi
