#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pbphase/relative_phase.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace pbphase;

// Reference values computed with 40-digit arbitrary-precision arithmetic.
// Oracle comparisons run with a mass tolerance far below the comparison
// tolerance (the truncation error scales like the square root of the
// discarded mass).
const TruncationPolicy kTight{1e-28, 1'000'000};

TEST_CASE("product-form psi agrees with the squared single-beam series") {
    CHECK(psi_product_form(0.0) == 0.0);
    for (double nbar : {0.1, 1.0, 4.0, 10.0, 50.0}) {
        const double p = psi_pb(nbar).value;
        CHECK_THAT(psi_product_form(nbar), WithinRel(p * p, 1e-12));
    }
    CHECK_THROWS_AS(psi_product_form(-1.0), std::invalid_argument);
}

TEST_CASE("ladder-operator phase-difference fluctuation, equal beams") {
    CHECK_THAT(fluct_sgpd(4.0), WithinAbs(0.12865890039999434, 1e-13));
    // An impossible consistency demand must be reported, not absorbed.
    CHECK_THROWS_AS(fluct_sgpd(4.0, {}, 1e-18), ConsistencyError);
}

TEST_CASE("window phase-difference fluctuation, equal beams") {
    CHECK_THAT(fluct_pbpd(4.0), WithinAbs(0.14697453928872852, 1e-13));
    CHECK(fluct_pbpd(0.0) == 1.0);
}

TEST_CASE("unequal-intensity generalization reduces to the equal case") {
    for (double nbar : {0.5, 2.0, 8.0})
        CHECK_THAT(fluct_pbpd(nbar, nbar), WithinAbs(fluct_pbpd(nbar), 1e-15));
    // A vacuum beam forces maximal phase-difference fluctuation.
    CHECK(fluct_pbpd(0.0, 7.0) == 1.0);
    const double p1 = psi_pb(1.0).value;
    const double p3 = psi_pb(3.0).value;
    CHECK_THAT(fluct_pbpd(1.0, 3.0), WithinAbs(1.0 - p1 * p1 * p3 * p3, 1e-15));
}

TEST_CASE("doubled single-beam variance route") {
    CHECK_THAT(fluct_pb_doubled(50.0, 0.0, kTight),
               WithinAbs(2.0 * 9.5186533735184659, 1e-12));
    CHECK_THAT(fluct_pb_doubled(4.0, kPi, kTight),
               WithinAbs(2.0 * 0.081507463461874558, 1e-12));
}

TEST_CASE("two-beam spec compares intensities, not phases") {
    CHECK(TwoBeamSpec(CoherentSpec(4.0, 0.7), CoherentSpec(4.0, 1.934)).equal_distributions());
    CHECK_FALSE(TwoBeamSpec(CoherentSpec(1.0, 0.0), CoherentSpec(3.0, 0.0)).equal_distributions());
}

TEST_CASE("product-measure quadrature confirms the factorized closed forms") {
    // The integrand is a trigonometric polynomial, so a periodic grid wider
    // than the spectral content integrates it exactly up to roundoff.
    const TwoBeamSpec equal(CoherentSpec(2.0, 0.4), CoherentSpec(2.0, 1.9));
    CHECK_THAT(relative_fluct_quadrature(equal, 512),
               WithinAbs(fluct_pbpd(2.0), 1e-12));

    const TwoBeamSpec unequal(CoherentSpec(1.0, 0.0), CoherentSpec(3.0, 0.8));
    CHECK_THAT(relative_fluct_quadrature(unequal, 512),
               WithinAbs(fluct_pbpd(1.0, 3.0), 1e-12));
}
