#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pbphase/common.hpp"
#include "pbphase/distribution.hpp"
#include "pbphase/fluctuations.hpp"
#include "pbphase/state.hpp"

// Phase-difference fluctuation measures for two independent beams with a
// product joint distribution P(phi1, phi2) = P(phi1) P(phi2):
//
//   (D cos(phi1-phi2))^2 + (D sin(phi1-phi2))^2 = 1 - |<e^{i phi1}>|^2 |<e^{i phi2}>|^2
//
// which for equal coherent beams closes to 1 - psi(nbar)^4.  The ladder
// -operator analogue subtracts a further e^{-nbar}.

namespace pbphase {

/// Two independent coherent beams feeding a relative-phase measurement.
struct TwoBeamSpec {
    CoherentSpec beam1;
    CoherentSpec beam2;

    TwoBeamSpec(const CoherentSpec& b1, const CoherentSpec& b2) : beam1(b1), beam2(b2) {}

    /// Equal-intensity beams (possibly different phases from path offsets).
    bool equal_distributions() const {
        return beam1.mean_photons() == beam2.mean_photons();
    }
};

/// psi in its product printed form nbar e^{-2 nbar} [sum_n nbar^n/(n! sqrt(n+1))]^2,
/// summed in log space.  Identical to psi_pb(nbar)^2.
inline double psi_product_form(double nbar, const TruncationPolicy& policy = {}) {
    if (!(nbar >= 0.0))
        throw std::invalid_argument("psi_product_form: nbar must be >= 0");
    if (nbar == 0.0) return 0.0;

    const double log_nbar = std::log(nbar);
    // Shift by the peak term (n near nbar) so the scaled sum stays in range.
    const auto log_term = [&](long n) {
        return n * log_nbar - std::lgamma(n + 1.0) - 0.5 * std::log1p(static_cast<double>(n));
    };
    const double shift = log_term(static_cast<long>(nbar));
    double scaled_sum = 0.0;
    for (long n = 0; n < policy.hard_max_terms; ++n) {
        const double lt = log_term(n);
        scaled_sum += std::exp(lt - shift);
        // Term ratio nbar/(n+1) * sqrt((n+1)/(n+2)) < 1 past the peak gives a
        // geometric tail; stop once it is negligible relative to the sum.
        const double ratio = nbar / (n + 1.0) * std::sqrt((n + 1.0) / (n + 2.0));
        if (ratio < 1.0) {
            const double tail = std::exp(lt - shift) * ratio / (1.0 - ratio);
            if (tail < scaled_sum * 1e-17)
                return std::exp(log_nbar - 2.0 * nbar + 2.0 * (shift + std::log(scaled_sum)));
        }
    }
    throw TruncationError("psi_product_form: series did not settle within hard_max_terms=" +
                          std::to_string(policy.hard_max_terms));
}

/// Ladder-operator phase-difference fluctuation for two equal independent
/// coherent beams: 1 - e^{-nbar} - psi^2, with psi evaluated through the
/// product form and cross-checked against psi_pb^2.
inline double fluct_sgpd(double nbar, const TruncationPolicy& policy = {},
                         double consistency_tol = 1e-12) {
    const double psi = psi_product_form(nbar, policy);
    const double psi_pb_val = psi_pb(nbar, policy).value;
    const double gap = std::fabs(psi - psi_pb_val * psi_pb_val);
    if (gap > consistency_tol)
        throw ConsistencyError("fluct_sgpd: product-form psi deviates from psi_pb^2 by " +
                               std::to_string(gap));
    return 1.0 - std::exp(-nbar) - psi * psi;
}

/// Window phase-difference fluctuation for two equal independent coherent
/// beams: 1 - psi_pb(nbar)^4.
inline double fluct_pbpd(double nbar, const TruncationPolicy& policy = {}) {
    const double psi = psi_pb(nbar, policy).value;
    return 1.0 - psi * psi * psi * psi;
}

/// Unequal-intensity generalization 1 - psi_pb(nbar1)^2 psi_pb(nbar2)^2.
inline double fluct_pbpd(double nbar1, double nbar2, const TruncationPolicy& policy = {}) {
    const double p1 = psi_pb(nbar1, policy).value;
    const double p2 = psi_pb(nbar2, policy).value;
    return 1.0 - p1 * p1 * p2 * p2;
}

/// Doubled single-beam variance 2 * var(phi) at the given relative phase:
/// the phase-difference variance of two identical independent beams when
/// treated as two separate variance measurements.
inline double fluct_pb_doubled(double nbar, double delta_xi,
                               const TruncationPolicy& policy = {}) {
    return 2.0 * variance_phase(CoherentSpec(nbar, delta_xi, 0.0), policy).variance;
}

/// Literal product-measure evaluation of
/// (D cos(phi1-phi2))^2 + (D sin(phi1-phi2))^2 on an n x n periodic grid;
/// independent cross-check of the factorized closed forms.
inline double relative_fluct_quadrature(const PhaseDistribution& d1,
                                        const PhaseDistribution& d2,
                                        int grid_points = 2048) {
    const int n = grid_points;
    const double h = kTwoPi / n;
    std::vector<double> p1(n), p2(n);
    for (int i = 0; i < n; ++i) {
        const double phi = h * i;
        p1[i] = eval_density(d1, phi);
        p2[i] = eval_density(d2, phi);
    }
    double total = 0.0, mean_cos = 0.0, mean_sin = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double w = p1[i] * p2[j];
            const double diff = h * (i - j);
            total += w;
            mean_cos += w * std::cos(diff);
            mean_sin += w * std::sin(diff);
        }
    }
    mean_cos /= total;
    mean_sin /= total;
    // <cos^2 + sin^2> = 1 under the normalized product measure.
    return 1.0 - mean_cos * mean_cos - mean_sin * mean_sin;
}

inline double relative_fluct_quadrature(const TwoBeamSpec& spec, int grid_points = 2048,
                                        const TruncationPolicy& policy = {}) {
    return relative_fluct_quadrature(build_distribution(spec.beam1, policy),
                                     build_distribution(spec.beam2, policy), grid_points);
}

}  // namespace pbphase
