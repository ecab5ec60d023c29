#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "pbphase/common.hpp"
#include "pbphase/quadrature.hpp"
#include "pbphase/state.hpp"

// Continuous-limit phase distribution of a number-basis state over one
// 2*pi window anchored at phi0.  For a pure state with coefficients
// sqrt(P_n) e^{i chi(n)} the density at window coordinate u in [0, 2*pi) is
//
//   P(u) = (1/2pi) |sum_n c_n e^{i n (u - delta)}|^2
//
// where for number-linear phases chi(n) = n xi + xi0 the c_n = sqrt(P_n) are
// real and delta = xi - phi0 (mod 2*pi); general phase tables fold into
// complex c_n with delta = 0.  Diagonal mixtures collapse to the uniform
// density 1/2pi exactly and are represented by a dedicated marker.

namespace pbphase {

class PhaseDistribution {
public:
    static PhaseDistribution uniform_marker() { return PhaseDistribution(); }

    static PhaseDistribution from_coefficients(std::vector<std::complex<double>> coeffs,
                                               double delta, double amplitude_tail = 0.0) {
        if (coeffs.empty())
            throw std::invalid_argument("PhaseDistribution: empty coefficient set");
        PhaseDistribution d;
        d.uniform_ = false;
        d.coeffs_ = std::move(coeffs);
        d.delta_ = reduce_mod_2pi(delta);
        d.amp_tail_ = amplitude_tail;
        return d;
    }

    bool is_uniform() const { return uniform_; }
    const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }
    /// Window-relative location of the coefficient-sum peak, in [0, 2*pi).
    double delta() const { return delta_; }
    /// Bound on the summed amplitude magnitude lost to truncation.
    double amplitude_tail() const { return amp_tail_; }

private:
    PhaseDistribution() = default;

    bool uniform_ = true;
    std::vector<std::complex<double>> coeffs_;
    double delta_ = 0.0;
    double amp_tail_ = 0.0;
};

inline PhaseDistribution build_distribution(const NumberBasisState& state,
                                            double offset_phi0 = 0.0) {
    if (state.kind() == StateKind::diagonal_mixture)
        return PhaseDistribution::uniform_marker();

    const auto& p = state.probs();
    std::vector<std::complex<double>> c(p.size());
    if (state.has_linear_phase()) {
        for (std::size_t n = 0; n < p.size(); ++n) c[n] = std::sqrt(p[n]);
        return PhaseDistribution::from_coefficients(
            std::move(c), state.xi() - offset_phi0, state.amplitude_tail());
    }
    // Explicit phase table: c_n = sqrt(P_n) e^{-i (chi_n - n phi0)}.
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double chi = state.phase_at(n) - static_cast<double>(n) * offset_phi0;
        c[n] = std::polar(std::sqrt(p[n]), -chi);
    }
    return PhaseDistribution::from_coefficients(std::move(c), 0.0, state.amplitude_tail());
}

inline PhaseDistribution build_distribution(const CoherentSpec& spec,
                                            const TruncationPolicy& policy = {}) {
    return build_distribution(NumberBasisState::coherent(spec, policy),
                              spec.offset_phi0());
}

/// Density at window coordinate phi in [0, 2*pi); nonnegative by construction.
inline double eval_density(const PhaseDistribution& dist, double phi) {
    if (dist.is_uniform()) return 1.0 / kTwoPi;
    const std::complex<double> z = std::polar(1.0, phi - dist.delta());
    std::complex<double> s{0.0, 0.0};
    const auto& c = dist.coeffs();
    for (std::size_t i = c.size(); i-- > 0;) s = s * z + c[i];
    return std::norm(s) / kTwoPi;
}

namespace detail {

/// Autocorrelations rho_j = sum_n c_{n+j} conj(c_n), j = 0..N-1, so that
/// 2*pi*P(u) = sum_j rho_j e^{i j (u-delta)} with rho_{-j} = conj(rho_j).
inline std::vector<std::complex<double>> density_autocorrelation(
    const PhaseDistribution& dist) {
    const auto& c = dist.coeffs();
    const std::size_t n = c.size();
    std::vector<std::complex<double>> rho(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i + j < n; ++i) acc += c[i + j] * std::conj(c[i]);
        rho[j] = acc;
    }
    return rho;
}

}  // namespace detail

enum class MomentMethod { fourier, quadrature };

/// k-th raw moment of the window coordinate, k in {1, 2}.
///
/// The fourier method resolves the moment integral term by term against the
/// density's Fourier series (exact up to state truncation); the quadrature
/// method integrates phi^k P(phi) by Romberg refinement and serves as an
/// independent cross-check.
inline SeriesValue moment(const PhaseDistribution& dist, int k,
                          MomentMethod method = MomentMethod::fourier,
                          double quad_abs_tol = 1e-10) {
    if (k != 1 && k != 2)
        throw std::invalid_argument("moment: only k = 1 and k = 2 are supported");

    if (dist.is_uniform()) {
        const double value = (k == 1) ? kPi : 4.0 * kPi * kPi / 3.0;
        return {value, 0.0, 1};
    }

    if (method == MomentMethod::quadrature) {
        auto q = romberg([&](double phi) {
            return std::pow(phi, k) * eval_density(dist, phi);
        }, 0.0, kTwoPi, quad_abs_tol);
        return {q.value, q.error_estimate, q.evaluations};
    }

    const auto rho = detail::density_autocorrelation(dist);
    const double delta = dist.delta();
    double m = (k == 1) ? kPi : 4.0 * kPi * kPi / 3.0;
    for (std::size_t j = 1; j < rho.size(); ++j) {
        const double jd = static_cast<double>(j);
        const std::complex<double> w = rho[j] * std::polar(1.0, -jd * delta);
        if (k == 1)
            m += 2.0 / jd * w.imag();
        else
            m += 4.0 * kPi / jd * w.imag() + 4.0 / (jd * jd) * w.real();
    }

    // Truncation remainder: a perturbation |dS| <= tau of the coefficient sum
    // moves the density by at most (2 |S| tau + tau^2)/2pi pointwise, and
    // phi^k <= (2pi)^k over the window.
    const double tau = dist.amplitude_tail();
    double amp_sum = 0.0;
    for (const auto& c : dist.coeffs()) amp_sum += std::abs(c);
    const double bound = std::pow(kTwoPi, k) * tau * (2.0 * amp_sum + tau);
    return {m, bound, static_cast<long>(rho.size())};
}

/// Mean of the window coordinate (relative phase xi - phi0 plus wrap-around
/// spread); exact Fourier route.
inline double mean_relative_phase(const CoherentSpec& spec,
                                  const TruncationPolicy& policy = {}) {
    return moment(build_distribution(spec, policy), 1).value;
}

inline double mean_relative_phase(const NumberBasisState& state,
                                  double offset_phi0 = 0.0) {
    return moment(build_distribution(state, offset_phi0), 1).value;
}

/// <e^{i k phi}> under the distribution, resolved exactly from the
/// coefficient autocorrelation: conj(rho_k) e^{i k delta}.
inline std::complex<double> trig_moment(const PhaseDistribution& dist, int order) {
    if (order < 0)
        return std::conj(trig_moment(dist, -order));
    if (order == 0) return {1.0, 0.0};
    if (dist.is_uniform()) return {0.0, 0.0};
    const auto& c = dist.coeffs();
    if (static_cast<std::size_t>(order) >= c.size()) return {0.0, 0.0};
    std::complex<double> rho{0.0, 0.0};
    for (std::size_t i = 0; i + order < c.size(); ++i)
        rho += c[i + order] * std::conj(c[i]);
    return std::conj(rho) * std::polar(1.0, order * dist.delta());
}

/// Same moment through a periodic trapezoid grid (spectrally accurate);
/// independent of the autocorrelation route.
inline std::complex<double> trig_moment_quadrature(const PhaseDistribution& dist,
                                                   int order, int grid_points = 4096) {
    const double re = periodic_trapezoid([&](double phi) {
        return std::cos(order * phi) * eval_density(dist, phi);
    }, grid_points);
    const double im = periodic_trapezoid([&](double phi) {
        return std::sin(order * phi) * eval_density(dist, phi);
    }, grid_points);
    return {re, im};
}

struct FiniteSReport {
    double mean = 0.0;
    double variance = 0.0;
    int dimension = 0;
};

/// Phase statistics evaluated literally in the (s+1)-dimensional truncated
/// operator space, with eigenphases phi0 + 2*pi*m/(s+1).  Converges to the
/// continuous-limit moments as s grows; used to validate the limit route.
inline FiniteSReport finite_s_operator_check(const NumberBasisState& state, int s,
                                             double offset_phi0 = 0.0) {
    if (s < 1)
        throw std::invalid_argument("finite_s_operator_check: s must be >= 1");
    if (s > 2000)
        throw std::invalid_argument("finite_s_operator_check: dimension too large (s > 2000)");

    const long dim = s + 1;
    const auto& p = state.probs();
    const std::size_t n_terms = std::min<std::size_t>(p.size(), static_cast<std::size_t>(dim));

    std::vector<double> q(dim, 0.0);
    if (state.kind() == StateKind::diagonal_mixture) {
        // Each |n><n| projects uniformly onto every eigenstate.
        for (auto& v : q) v = 1.0 / static_cast<double>(dim);
    } else {
        for (long m = 0; m < dim; ++m) {
            const double phi_m = offset_phi0 + kTwoPi * static_cast<double>(m) / dim;
            std::complex<double> amp{0.0, 0.0};
            for (std::size_t n = 0; n < n_terms; ++n)
                amp += std::polar(std::sqrt(p[n]),
                                  state.phase_at(n) - static_cast<double>(n) * phi_m);
            q[m] = std::norm(amp);
        }
        double total = 0.0;
        for (double v : q) total += v;
        for (auto& v : q) v /= total;
    }

    double mean = 0.0, second = 0.0;
    for (long m = 0; m < dim; ++m) {
        const double x = kTwoPi * static_cast<double>(m) / dim;  // window-relative eigenvalue
        mean += q[m] * x;
        second += q[m] * x * x;
    }
    return {mean, second - mean * mean, static_cast<int>(dim)};
}

}  // namespace pbphase
