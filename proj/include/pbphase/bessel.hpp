#pragma once

#include <cmath>
#include <cstddef>

#include "pbphase/common.hpp"

// Modified Bessel function of the first kind, order zero.
//
// The small-argument branch sums the defining power series
//   I0(x) = sum_k (x^2/4)^k / (k!)^2
// which converges fast for |x| <= 15 and doubles as a reference for the
// large-argument branch.  For x > 15 we use the minimax rational
// approximation of Blair and Edwards (Chalk River Report AECL-4928, 1974)
// in the variable 1/x - 1/15, scaled by exp(x)/sqrt(x).

namespace pbphase {
namespace detail {

template <std::size_t N>
inline double evaluate_polynomial(const double (&poly)[N], double x) {
    double r = poly[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) r = r * x + poly[i];
    return r;
}

inline double i0_power_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    double comp = 0.0;  // Kahan compensation
    for (int k = 1; k < 400; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

// exp(-x) * sqrt(x) * I0(x) for x > 15 (Blair-Edwards coefficients).
inline double i0_scaled_large(double x) {
    static const double P2[] = {
        -2.2210262233306573296e-04, 1.3067392038106924055e-02,
        -4.4700805721174453923e-01, 5.5674518371240761397e+00,
        -2.3517945679239481621e+01, 3.1611322818701131207e+01,
        -9.6090021968656180000e+00,
    };
    static const double Q2[] = {
        -5.5194330231005480228e-04, 3.2547697594819615062e-02,
        -1.1151759188741312645e+00, 1.3982595353892851542e+01,
        -6.0228002066743340583e+01, 8.5539563258012929600e+01,
        -3.1446690275135491500e+01, 1.0,
    };
    const double y = 1.0 / x - 1.0 / 15.0;
    return evaluate_polynomial(P2, y) / evaluate_polynomial(Q2, y);
}

}  // namespace detail

inline double bessel_i0(double x) {
    x = std::fabs(x);  // even function
    if (x == 0.0) return 1.0;
    if (x <= 15.0) return detail::i0_power_series(x);
    return std::exp(x) / std::sqrt(x) * detail::i0_scaled_large(x);
}

/// log(I0(x)); stays finite where exp(x) alone would overflow.
inline double log_bessel_i0(double x) {
    x = std::fabs(x);
    if (x <= 15.0) return std::log(detail::i0_power_series(x));
    return x - 0.5 * std::log(x) + std::log(detail::i0_scaled_large(x));
}

}  // namespace pbphase
