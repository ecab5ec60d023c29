#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pbphase {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Value of a truncated series or refined integral together with a rigorous
// bound on the discarded remainder and the number of terms consumed.
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
    long terms_used = 0;
};

// Tail tolerance could not be met within the term budget.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative refinement stalled before reaching the requested tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two routes to the same quantity disagree beyond tolerance.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (message carries the line number).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Well-formed input with invalid content.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reduce an angle to the canonical window [0, 2*pi).
inline double reduce_mod_2pi(double x) {
    double r = x - kTwoPi * std::floor(x / kTwoPi);
    if (r >= kTwoPi) r -= kTwoPi;  // floor rounding can land exactly on 2*pi
    if (r < 0.0) r = 0.0;
    return r;
}

}  // namespace pbphase
