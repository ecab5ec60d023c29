#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pbphase/common.hpp"

namespace pbphase {

// Controls how infinite number-basis sums are cut off: keep adding terms
// until the neglected probability mass is below tail_mass_tol, giving up
// (TruncationError) once hard_max_terms have been consumed.
struct TruncationPolicy {
    double tail_mass_tol = 1e-14;
    long hard_max_terms = 1'000'000;
};

/// A coherent state of mean photon number `mean_photons` carrying optical
/// phase `phase_xi`, measured against a phase window anchored at
/// `offset_phi0`.  Only the difference xi - phi0 is observable.
class CoherentSpec {
public:
    explicit CoherentSpec(double mean_photons, double phase_xi = 0.0,
                          double offset_phi0 = 0.0)
        : mean_photons_(mean_photons), phase_xi_(phase_xi), offset_phi0_(offset_phi0) {
        if (!(mean_photons >= 0.0))
            throw std::invalid_argument("CoherentSpec: mean photon number must be >= 0");
        if (!std::isfinite(phase_xi) || !std::isfinite(offset_phi0))
            throw std::invalid_argument("CoherentSpec: phases must be finite");
    }

    double mean_photons() const { return mean_photons_; }
    double phase_xi() const { return phase_xi_; }
    double offset_phi0() const { return offset_phi0_; }

    /// xi - phi0 reduced to [0, 2*pi).
    double delta_xi() const { return reduce_mod_2pi(phase_xi_ - offset_phi0_); }

private:
    double mean_photons_;
    double phase_xi_;
    double offset_phi0_;
};

namespace detail {

struct PoissonTable {
    std::vector<double> probs;   // renormalized, sums to 1
    double prob_tail = 0.0;      // bound on neglected probability mass
    double amp_tail = 0.0;       // bound on sum of neglected amplitudes sqrt(p_n)
};

inline PoissonTable poisson_table(double nbar, const TruncationPolicy& policy) {
    if (!(nbar >= 0.0))
        throw std::invalid_argument("poisson_table: mean must be >= 0");
    if (nbar == 0.0) return {{1.0}, 0.0, 0.0};

    const double log_nbar = std::log(nbar);
    std::vector<double> p;
    double cum = 0.0;
    for (long n = 0; n < policy.hard_max_terms; ++n) {
        const double pn = std::exp(-nbar + n * log_nbar - std::lgamma(n + 1.0));
        p.push_back(pn);
        cum += pn;
        // Past the peak the term ratio p_{k+1}/p_k = nbar/(k+1) is < 1 and
        // decreasing, so the neglected mass is bounded by the geometric
        // series pn * rho / (1 - rho).  Stopping on this analytic bound
        // (rather than on the accumulated mass reaching 1) keeps the cut
        // independent of rounding noise in the partial sums.
        const double rho = nbar / static_cast<double>(n + 1);
        if (rho < 1.0 && pn * rho / (1.0 - rho) <= policy.tail_mass_tol) {
            // Amplitude tail: sqrt(p_{n+1})/sqrt(p_n) = sqrt(nbar/(n+1)) is
            // decreasing, so past the cut the amplitudes are dominated by a
            // geometric series with that ratio.
            const double r = std::sqrt(rho);
            double amp_tail = std::sqrt(pn) * r / (1.0 - r);
            for (auto& v : p) v /= cum;
            // Renormalization scales every amplitude by 1/sqrt(cum); fold
            // that deviation from the ideal state into the amplitude tail.
            double amp_sum = 0.0;
            for (double v : p) amp_sum += std::sqrt(v);
            amp_tail += amp_sum * std::fabs(1.0 / std::sqrt(cum) - 1.0);
            return {std::move(p), policy.tail_mass_tol, amp_tail};
        }
    }
    throw TruncationError(
        "poisson_table: tail mass tolerance not reached within hard_max_terms=" +
        std::to_string(policy.hard_max_terms));
}

}  // namespace detail

/// Photon-number probabilities of a coherent state, truncated per `policy`
/// and renormalized.
inline std::vector<double> poisson_probs(double nbar, const TruncationPolicy& policy = {}) {
    return detail::poisson_table(nbar, policy).probs;
}

enum class StateKind { pure, diagonal_mixture };

/// A state described in the photon-number basis: either a pure state
/// sqrt(P_n) e^{-i xi(n)} |n> or a diagonal mixture sum_n P_n |n><n|.
class NumberBasisState {
public:
    static NumberBasisState coherent(const CoherentSpec& spec,
                                     const TruncationPolicy& policy = {}) {
        auto table = detail::poisson_table(spec.mean_photons(), policy);
        NumberBasisState s(StateKind::pure, std::move(table.probs));
        s.linear_phase_ = true;
        s.xi_ = spec.phase_xi();
        s.amp_tail_ = table.amp_tail;
        return s;
    }

    /// Pure state with number-linear phase xi(n) = xi * n + xi0.
    static NumberBasisState pure_linear(std::vector<double> probs, double xi,
                                        double xi0 = 0.0) {
        NumberBasisState s(StateKind::pure, normalized(std::move(probs)));
        s.linear_phase_ = true;
        s.xi_ = xi;
        s.xi0_ = xi0;
        return s;
    }

    /// Pure state with an explicit phase table xi(n).
    static NumberBasisState pure_tabulated(std::vector<double> probs,
                                           std::vector<double> phases) {
        if (phases.size() != probs.size())
            throw std::invalid_argument("NumberBasisState: phase table size mismatch");
        NumberBasisState s(StateKind::pure, normalized(std::move(probs)));
        s.linear_phase_ = false;
        s.phases_ = std::move(phases);
        return s;
    }

    /// Diagonal mixture of number states with weights P_n.
    static NumberBasisState mixture(std::vector<double> probs) {
        return NumberBasisState(StateKind::diagonal_mixture, normalized(std::move(probs)));
    }

    StateKind kind() const { return kind_; }
    const std::vector<double>& probs() const { return probs_; }
    bool has_linear_phase() const { return linear_phase_; }

    /// xi(n); for linear-phase states this is xi * n + xi0.
    double phase_at(std::size_t n) const {
        if (linear_phase_) return xi_ * static_cast<double>(n) + xi0_;
        return phases_[n];
    }
    double xi() const { return xi_; }

    /// Bound on the summed amplitudes sqrt(P_n) dropped by truncation
    /// (zero for states given explicitly).
    double amplitude_tail() const { return amp_tail_; }

    double mean_number() const {
        double m = 0.0;
        for (std::size_t n = 0; n < probs_.size(); ++n) m += probs_[n] * static_cast<double>(n);
        return m;
    }

    double number_variance() const {
        const double m = mean_number();
        double v = 0.0;
        for (std::size_t n = 0; n < probs_.size(); ++n) {
            const double d = static_cast<double>(n) - m;
            v += probs_[n] * d * d;
        }
        return v;
    }

private:
    NumberBasisState(StateKind kind, std::vector<double> probs)
        : kind_(kind), probs_(std::move(probs)) {}

    static std::vector<double> normalized(std::vector<double> probs) {
        if (probs.empty())
            throw std::invalid_argument("NumberBasisState: empty probability table");
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0))
                throw std::invalid_argument("NumberBasisState: probabilities must be >= 0");
            sum += p;
        }
        if (!(sum > 0.0) || !std::isfinite(sum))
            throw std::invalid_argument("NumberBasisState: probabilities must have positive finite sum");
        for (auto& p : probs) p /= sum;
        return probs;
    }

    StateKind kind_;
    std::vector<double> probs_;
    bool linear_phase_ = true;
    double xi_ = 0.0;
    double xi0_ = 0.0;
    std::vector<double> phases_;
    double amp_tail_ = 0.0;
};

}  // namespace pbphase
