#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "pbphase/common.hpp"
#include "pbphase/distribution.hpp"
#include "pbphase/state.hpp"

// Single-beam phase fluctuation measures: the phase-variance route through
// the window moments, and the periodicity-respecting trigonometric measure
//   (D cos)^2 + (D sin)^2 = 1 - <cos>^2 - <sin>^2
// whose coherent-state value is governed by the series psi below.

namespace pbphase {

/// psi(nbar) = sqrt(nbar) e^{-nbar} sum_n nbar^n / sqrt(n! (n+1)!).
/// Equals |<e^{i phi}>| for a coherent state with mean photon number nbar.
/// Terms are evaluated in log space; the tail is bounded by a geometric
/// series from the term ratio nbar / sqrt((n+1)(n+2)).
inline SeriesValue psi_pb(double nbar, const TruncationPolicy& policy = {}) {
    if (!(nbar >= 0.0))
        throw std::invalid_argument("psi_pb: nbar must be >= 0");
    if (nbar == 0.0) return {0.0, 0.0, 1};

    const double log_nbar = std::log(nbar);
    double sum = 0.0;
    double comp = 0.0;  // Kahan compensation
    for (long n = 0; n < policy.hard_max_terms; ++n) {
        const double log_term = 0.5 * log_nbar - nbar + n * log_nbar
            - 0.5 * (std::lgamma(n + 1.0) + std::lgamma(n + 2.0));
        const double term = std::exp(log_term);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        const double ratio = nbar / std::sqrt((n + 1.0) * (n + 2.0));
        if (ratio < 1.0) {
            const double tail = term * ratio / (1.0 - ratio);
            if (tail < policy.tail_mass_tol) return {sum, tail, n + 1};
        }
    }
    throw TruncationError("psi_pb: tail bound not reached within hard_max_terms=" +
                          std::to_string(policy.hard_max_terms));
}

/// Trigonometric fluctuation of the window phase for a coherent state:
/// 1 - psi(nbar)^2.
inline double trig_fluct_pb(double nbar, const TruncationPolicy& policy = {}) {
    const double psi = psi_pb(nbar, policy).value;
    return 1.0 - psi * psi;
}

/// Same measure for the non-unitary exponential-phase (ladder) operators:
/// the pair obeys C^2 + S^2 = 1 - (1/2)|0><0|, shifting the coherent value
/// down by half the vacuum weight.
inline double trig_fluct_sg(double nbar, const TruncationPolicy& policy = {}) {
    return trig_fluct_pb(nbar, policy) - 0.5 * std::exp(-nbar);
}

/// General-state trigonometric fluctuation via the distribution's first
/// trigonometric moment: 1 - |<e^{i phi}>|^2.  Diagonal mixtures give 1.
inline double trig_fluct_pb(const NumberBasisState& state) {
    const auto dist = build_distribution(state);
    return 1.0 - std::norm(trig_moment(dist, 1));
}

/// Ladder-operator variant for a general state: the identity
/// C^2 + S^2 = 1 - (1/2)|0><0| holds for any state, so the value is the
/// window measure minus half the vacuum probability P_0.
inline double trig_fluct_sg(const NumberBasisState& state) {
    return trig_fluct_pb(state) - 0.5 * state.probs().front();
}

/// <e^{i phi}> for a coherent state relative to its window: psi(nbar) at
/// angle delta_xi.
inline std::complex<double> exp_phase_expectation(const CoherentSpec& spec,
                                                  const TruncationPolicy& policy = {}) {
    return std::polar(psi_pb(spec.mean_photons(), policy).value, spec.delta_xi());
}

struct VarianceReport {
    double variance = 0.0;
    double mean = 0.0;
    double lower_bound = 0.0;   // 1 / (4 <DN^2> + 3/pi^2)
    double upper_bound = 0.0;   // pi^2
    bool satisfies_bounds = false;
};

namespace detail {

inline VarianceReport variance_from_distribution(const PhaseDistribution& dist,
                                                 double number_variance) {
    VarianceReport r;
    const double m1 = moment(dist, 1).value;
    const double m2 = moment(dist, 2).value;
    r.mean = m1;
    r.variance = m2 - m1 * m1;
    r.lower_bound = 1.0 / (4.0 * number_variance + 3.0 / (kPi * kPi));
    r.upper_bound = kPi * kPi;
    // 1e-10 slack absorbs rounding when the bounds are saturated exactly.
    r.satisfies_bounds = r.variance >= r.lower_bound - 1e-10 &&
                         r.variance <= r.upper_bound + 1e-10;
    return r;
}

}  // namespace detail

/// Window-phase variance with the number-phase uncertainty bounds
/// 1/(4 <DN^2> + 3/pi^2) <= var <= pi^2.
inline VarianceReport variance_phase(const CoherentSpec& spec,
                                     const TruncationPolicy& policy = {}) {
    return detail::variance_from_distribution(build_distribution(spec, policy),
                                              spec.mean_photons());
}

inline VarianceReport variance_phase(const NumberBasisState& state,
                                     double offset_phi0 = 0.0) {
    return detail::variance_from_distribution(build_distribution(state, offset_phi0),
                                              state.number_variance());
}

/// Expectation of the number-phase commutator: i (1 - 2*pi*P(0)), with the
/// density evaluated at the window edge.
inline std::complex<double> commutator_expectation(const PhaseDistribution& dist) {
    return {0.0, 1.0 - kTwoPi * eval_density(dist, 0.0)};
}

inline std::complex<double> commutator_expectation(const CoherentSpec& spec,
                                                   const TruncationPolicy& policy = {}) {
    return commutator_expectation(build_distribution(spec, policy));
}

struct UncertaintyReport {
    // Number-phase uncertainty product against the commutator expectation:
    // var_phi * var_N >= (1/4) |1 - 2*pi*P(0)|^2.
    double heisenberg_lhs = 0.0;
    double heisenberg_rhs = 0.0;
    double heisenberg_margin = 0.0;
    bool heisenberg_ok = false;
    // Window-edge relation nbar * var_phi >= (1/4)(1 - 3 var_phi / pi^2)^2,
    // asserted only when the state sits opposite the window edge
    // (delta_xi = pi); margin can touch zero at saturation.
    bool judge_applicable = false;
    double judge_lhs = 0.0;
    double judge_rhs = 0.0;
    double judge_margin = 0.0;
    bool judge_ok = false;
};

namespace detail {

inline UncertaintyReport uncertainty_from_distribution(const PhaseDistribution& dist,
                                                       double number_variance) {
    UncertaintyReport u;
    const auto v = variance_from_distribution(dist, number_variance);
    const double edge = 1.0 - kTwoPi * eval_density(dist, 0.0);
    u.heisenberg_lhs = v.variance * number_variance;
    u.heisenberg_rhs = 0.25 * edge * edge;
    u.heisenberg_margin = u.heisenberg_lhs - u.heisenberg_rhs;
    u.heisenberg_ok = u.heisenberg_margin >= -1e-12;
    return u;
}

}  // namespace detail

inline UncertaintyReport check_uncertainty(const CoherentSpec& spec,
                                           const TruncationPolicy& policy = {}) {
    const auto dist = build_distribution(spec, policy);
    auto u = detail::uncertainty_from_distribution(dist, spec.mean_photons());
    if (std::fabs(spec.delta_xi() - kPi) <= 1e-9) {
        const double var = detail::variance_from_distribution(dist, spec.mean_photons()).variance;
        u.judge_applicable = true;
        u.judge_lhs = spec.mean_photons() * var;
        const double paren = 1.0 - 3.0 * var / (kPi * kPi);
        u.judge_rhs = 0.25 * paren * paren;
        u.judge_margin = u.judge_lhs - u.judge_rhs;
        u.judge_ok = u.judge_margin >= -1e-12;
    }
    return u;
}

inline UncertaintyReport check_uncertainty(const NumberBasisState& state,
                                           double offset_phi0 = 0.0) {
    return detail::uncertainty_from_distribution(build_distribution(state, offset_phi0),
                                                 state.number_variance());
}

}  // namespace pbphase
