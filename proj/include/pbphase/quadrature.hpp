#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pbphase/common.hpp"

namespace pbphase {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

/// Romberg integration of f over [a, b]: composite trapezoid refined by
/// Richardson extrapolation.  Stops when two successive diagonal entries
/// differ by less than abs_tol; throws ConvergenceError if max_levels
/// refinements were not enough.
template <class F>
QuadratureResult romberg(F&& f, double a, double b, double abs_tol = 1e-10,
                         int max_levels = 22) {
    const double width = b - a;
    std::vector<double> prev{0.5 * width * (f(a) + f(b))};
    long evals = 2;
    for (int k = 1; k <= max_levels; ++k) {
        const long midpoints = 1L << (k - 1);
        const double h = width / static_cast<double>(1L << k);
        double acc = 0.0;
        for (long i = 0; i < midpoints; ++i) acc += f(a + (2 * i + 1) * h);
        evals += midpoints;

        std::vector<double> row{0.5 * prev[0] + h * acc};
        double pow4 = 1.0;
        for (std::size_t j = 0; j < prev.size(); ++j) {
            pow4 *= 4.0;
            row.push_back(row[j] + (row[j] - prev[j]) / (pow4 - 1.0));
        }
        const double delta = std::fabs(row.back() - prev.back());
        if (k >= 4 && delta < abs_tol)
            return {row.back(), delta, evals};
        prev = std::move(row);
    }
    throw ConvergenceError("romberg: did not reach requested tolerance within level budget");
}

/// Equal-weight trapezoid rule over one full period of a periodic integrand;
/// spectrally accurate for smooth periodic f.
template <class F>
double periodic_trapezoid(F&& f, int n, double period = kTwoPi) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += f(period * static_cast<double>(j) / n);
    return acc * period / n;
}

}  // namespace pbphase
