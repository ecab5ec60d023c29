#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "pbphase/fluctuations.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace pbphase;

// Reference values computed with 40-digit arbitrary-precision arithmetic.
// Oracle comparisons run with a mass tolerance far below the comparison
// tolerance (the truncation error scales like the square root of the
// discarded mass).
const TruncationPolicy kTight{1e-28, 1'000'000};

TEST_CASE("psi series reproduces reference values") {
    CHECK(psi_pb(0.0).value == 0.0);
    CHECK_THAT(psi_pb(0.1, kTight).value, WithinRel(0.30721788246855798, 1e-13));
    CHECK_THAT(psi_pb(1.0, kTight).value, WithinRel(0.77319265637928599, 1e-13));
    CHECK_THAT(psi_pb(4.0, kTight).value, WithinRel(0.96103786331510856, 1e-13));
    CHECK_THAT(psi_pb(10.0, kTight).value, WithinRel(0.98684849393315606, 1e-13));
    CHECK_THAT(psi_pb(50.0, kTight).value, WithinRel(0.99747751023477514, 1e-13));
    CHECK_THAT(psi_pb(100.0, kTight).value, WithinRel(0.99874445626911472, 1e-13));
    // The log-gamma noise floor grows with the term count; 1e-12 leaves
    // headroom over the observed 1e-13 deviation at this intensity.
    CHECK_THAT(psi_pb(400.0, kTight).value, WithinRel(0.99968715705209428, 1e-12));
    CHECK_THROWS_AS(psi_pb(-0.1), std::invalid_argument);
}

TEST_CASE("psi truncation reports an honest tail and obeys the cap") {
    const auto v = psi_pb(4.0);
    CHECK(v.tail_bound < 1e-13);
    CHECK(v.terms_used > 5);

    TruncationPolicy loose;
    loose.tail_mass_tol = 1e-6;
    const auto coarse = psi_pb(4.0, loose);
    CHECK(std::fabs(coarse.value - v.value) <= coarse.tail_bound + v.tail_bound);

    TruncationPolicy tiny;
    tiny.hard_max_terms = 5;
    CHECK_THROWS_AS(psi_pb(50.0, tiny), TruncationError);
}

TEST_CASE("trigonometric fluctuation measures and their bracket") {
    CHECK(trig_fluct_pb(0.0) == 1.0);
    CHECK_THAT(trig_fluct_pb(4.0), WithinAbs(0.07640622527473071, 1e-13));
    // 1/(1+4n) <= value <= 1 across the intensity range.
    for (double nbar : {0.0, 0.3, 1.0, 4.0, 10.0, 50.0, 100.0}) {
        const double v = trig_fluct_pb(nbar);
        CHECK(v <= 1.0);
        CHECK(v >= 1.0 / (1.0 + 4.0 * nbar) - 1e-15);
    }
}

TEST_CASE("ladder-operator measure sits half a vacuum weight below") {
    for (double nbar : {0.0, 0.5, 1.0, 4.0, 10.0, 50.0})
        CHECK_THAT(trig_fluct_pb(nbar) - trig_fluct_sg(nbar),
                   WithinAbs(0.5 * std::exp(-nbar), 1e-15));
}

TEST_CASE("general-state overloads match the coherent closed forms") {
    const auto state = NumberBasisState::coherent(CoherentSpec(4.0, 2.0));
    CHECK_THAT(trig_fluct_pb(state), WithinAbs(trig_fluct_pb(4.0), 1e-12));
    CHECK_THAT(trig_fluct_sg(state), WithinAbs(trig_fluct_sg(4.0), 1e-12));
}

TEST_CASE("diagonal mixtures have maximal trigonometric fluctuation") {
    const auto mix = NumberBasisState::mixture({0.5, 0.3, 0.2});
    CHECK(trig_fluct_pb(mix) == 1.0);
    CHECK_THAT(trig_fluct_sg(mix), WithinAbs(1.0 - 0.5 * 0.5, 1e-15));
}

TEST_CASE("exp_phase_expectation carries modulus psi at angle delta_xi") {
    const auto e = exp_phase_expectation(CoherentSpec(4.0, 2.0, 0.5));
    CHECK_THAT(std::abs(e), WithinAbs(0.96103786331510856, 1e-13));
    CHECK_THAT(std::arg(e), WithinAbs(1.5, 1e-13));
}

TEST_CASE("variance report carries the uncertainty bracket") {
    const auto vac = variance_phase(CoherentSpec(0.0, 1.0));
    CHECK_THAT(vac.variance, WithinAbs(kPi * kPi / 3.0, 1e-12));
    CHECK_THAT(vac.mean, WithinAbs(kPi, 1e-12));
    // The lower bound is saturated by the vacuum.
    CHECK_THAT(vac.variance, WithinAbs(vac.lower_bound, 1e-10));
    CHECK(vac.upper_bound == kPi * kPi);
    CHECK(vac.satisfies_bounds);

    const auto r = variance_phase(CoherentSpec(4.0, kPi), kTight);
    CHECK_THAT(r.variance, WithinAbs(0.081507463461874558, 1e-12));
    CHECK_THAT(r.lower_bound, WithinAbs(1.0 / (16.0 + 3.0 / (kPi * kPi)), 1e-15));
    CHECK(r.satisfies_bounds);
}

TEST_CASE("mixture variance equals the flat-window value") {
    const auto mix = NumberBasisState::mixture({0.5, 0.3, 0.2});
    const auto r = variance_phase(mix);
    CHECK_THAT(r.variance, WithinAbs(kPi * kPi / 3.0, 1e-12));
    CHECK_THAT(r.mean, WithinAbs(kPi, 1e-12));
    CHECK(r.satisfies_bounds);
}

TEST_CASE("commutator expectation follows the window-edge density") {
    const auto spec = CoherentSpec(4.0, kPi);
    const auto c = commutator_expectation(spec);
    CHECK(c.real() == 0.0);
    const auto dist = build_distribution(spec);
    CHECK_THAT(c.imag(), WithinAbs(1.0 - kTwoPi * eval_density(dist, 0.0), 1e-15));

    // Flat density: P(0) = 1/2pi makes the expectation vanish.
    const auto flat = commutator_expectation(
        build_distribution(NumberBasisState::mixture({1.0})));
    CHECK_THAT(c.real(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(flat.imag(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("uncertainty products hold with nonnegative margin") {
    for (double dxi : {0.4, 2.0, kPi}) {
        const auto u = check_uncertainty(CoherentSpec(4.0, dxi));
        CHECK(u.heisenberg_ok);
        CHECK(u.heisenberg_margin >= -1e-12);
        CHECK_THAT(u.heisenberg_margin,
                   WithinAbs(u.heisenberg_lhs - u.heisenberg_rhs, 1e-15));
    }
}

TEST_CASE("the window-edge bound applies only at delta_xi = pi") {
    const auto at_pi = check_uncertainty(CoherentSpec(4.0, kPi));
    CHECK(at_pi.judge_applicable);
    CHECK(at_pi.judge_ok);
    CHECK(at_pi.judge_margin >= 0.0);

    const auto off_pi = check_uncertainty(CoherentSpec(4.0, 1.0));
    CHECK_FALSE(off_pi.judge_applicable);

    // The vacuum saturates the bound.
    const auto vac = check_uncertainty(CoherentSpec(0.0, kPi));
    CHECK(vac.judge_applicable);
    CHECK_THAT(vac.judge_margin, WithinAbs(0.0, 1e-10));
}
