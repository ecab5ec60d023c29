#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pbphase/distribution.hpp"
#include "pbphase/quadrature.hpp"
#include "pbphase/state.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace pbphase;

TEST_CASE("CoherentSpec validates its inputs and reduces the window phase") {
    CHECK_THROWS_AS(CoherentSpec(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(CoherentSpec(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(CoherentSpec(1.0, std::nan("")), std::invalid_argument);

    CHECK(CoherentSpec(1.0, 1.5).delta_xi() == 1.5);
    CHECK_THAT(CoherentSpec(1.0, 7.0).delta_xi(), WithinAbs(7.0 - kTwoPi, 1e-15));
    CHECK_THAT(CoherentSpec(1.0, -1.0).delta_xi(), WithinAbs(kTwoPi - 1.0, 1e-15));
    CHECK_THAT(CoherentSpec(1.0, 0.9, 0.2).delta_xi(), WithinAbs(0.7, 1e-15));
}

TEST_CASE("poisson_probs matches the closed form and sums to one") {
    const auto p = poisson_probs(4.0);
    REQUIRE(p.size() >= 20);
    for (int n = 0; n < 6; ++n) {
        const double expected =
            std::exp(-4.0 + n * std::log(4.0) - std::lgamma(n + 1.0));
        CHECK_THAT(p[n], WithinRel(expected, 1e-13));
    }
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK_THAT(sum, WithinAbs(1.0, 1e-14));

    CHECK(poisson_probs(0.0) == std::vector<double>{1.0});
}

TEST_CASE("poisson_probs converges for large means") {
    // Regression: the truncation cut must come from the analytic tail bound,
    // not from the rounded partial sums reaching 1.
    for (double nbar : {150.0, 200.0, 500.0}) {
        const auto p = poisson_probs(nbar);
        double sum = 0.0, mean = 0.0;
        for (std::size_t n = 0; n < p.size(); ++n) {
            sum += p[n];
            mean += p[n] * static_cast<double>(n);
        }
        CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
        CHECK_THAT(mean, WithinRel(nbar, 1e-10));
    }
}

TEST_CASE("poisson truncation respects the hard term cap") {
    TruncationPolicy tight;
    tight.hard_max_terms = 10;
    CHECK_THROWS_AS(poisson_probs(50.0, tight), TruncationError);
}

TEST_CASE("NumberBasisState normalizes and validates") {
    const auto mix = NumberBasisState::mixture({2.0, 3.0, 5.0});
    CHECK(mix.kind() == StateKind::diagonal_mixture);
    CHECK_THAT(mix.probs()[0], WithinAbs(0.2, 1e-15));
    CHECK_THAT(mix.probs()[1], WithinAbs(0.3, 1e-15));
    CHECK_THAT(mix.probs()[2], WithinAbs(0.5, 1e-15));

    CHECK_THROWS_AS(NumberBasisState::mixture({}), std::invalid_argument);
    CHECK_THROWS_AS(NumberBasisState::mixture({1.0, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(NumberBasisState::mixture({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(NumberBasisState::pure_tabulated({0.5, 0.5}, {0.0}),
                    std::invalid_argument);
}

TEST_CASE("coherent states report their photon statistics") {
    const auto s = NumberBasisState::coherent(CoherentSpec(4.0, 1.0));
    CHECK(s.kind() == StateKind::pure);
    CHECK(s.has_linear_phase());
    CHECK(s.xi() == 1.0);
    CHECK(s.amplitude_tail() > 0.0);
    CHECK(s.amplitude_tail() < 1e-5);
    CHECK_THAT(s.mean_number(), WithinRel(4.0, 1e-10));
    CHECK_THAT(s.number_variance(), WithinRel(4.0, 1e-9));
}

TEST_CASE("phase tables and linear phases agree for chi(n) = xi n + xi0") {
    const auto probs = poisson_probs(3.0);
    std::vector<double> phases(probs.size());
    for (std::size_t n = 0; n < probs.size(); ++n)
        phases[n] = 0.7 * static_cast<double>(n) + 0.2;

    const auto linear = NumberBasisState::pure_linear(probs, 0.7, 0.2);
    const auto tabulated = NumberBasisState::pure_tabulated(probs, phases);
    const auto d1 = build_distribution(linear, 0.4);
    const auto d2 = build_distribution(tabulated, 0.4);
    for (int i = 0; i < 17; ++i) {
        const double phi = kTwoPi * static_cast<double>(i) / 17.0;
        CHECK_THAT(eval_density(d1, phi), WithinAbs(eval_density(d2, phi), 1e-15));
    }
}

TEST_CASE("diagonal mixtures collapse to the flat density") {
    const auto dist = build_distribution(NumberBasisState::mixture({0.3, 0.5, 0.2}));
    CHECK(dist.is_uniform());
    CHECK(eval_density(dist, 0.0) == 1.0 / kTwoPi);
    CHECK(eval_density(dist, 4.5) == 1.0 / kTwoPi);
}

TEST_CASE("coherent density is normalized, peaked and symmetric") {
    const double dxi = 2.1;
    const auto dist = build_distribution(CoherentSpec(4.0, dxi));

    const auto q = romberg([&](double u) { return eval_density(dist, u); },
                           0.0, kTwoPi, 1e-12);
    CHECK_THAT(q.value, WithinAbs(1.0, 1e-11));

    CHECK(eval_density(dist, dxi) > 1.0 / kTwoPi);
    for (double x : {0.3, 0.9, 1.7})
        CHECK_THAT(eval_density(dist, dxi + x),
                   WithinAbs(eval_density(dist, dxi - x), 1e-13));
}

TEST_CASE("window anchoring only shifts the density") {
    // Moving both the state phase and the window anchor by the same amount
    // leaves the window-relative density unchanged.
    const auto d1 = build_distribution(CoherentSpec(2.5, 1.0, 0.0));
    const auto d2 = build_distribution(CoherentSpec(2.5, 1.0 + 0.8, 0.8));
    for (double phi : {0.0, 0.5, 1.0, 2.0, 4.0, 6.0})
        CHECK_THAT(eval_density(d1, phi), WithinAbs(eval_density(d2, phi), 1e-14));
}

TEST_CASE("finite-dimension check validates its range") {
    const auto s = NumberBasisState::coherent(CoherentSpec(1.0));
    CHECK_THROWS_AS(finite_s_operator_check(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(finite_s_operator_check(s, 2001), std::invalid_argument);
    CHECK(finite_s_operator_check(s, 1).dimension == 2);
    CHECK(finite_s_operator_check(s, 2000).dimension == 2001);
}

TEST_CASE("finite-dimension statistics of flat spectra are exact") {
    // A diagonal mixture projects uniformly onto the s+1 eigenstates:
    //   mean = pi s/(s+1),  var = (pi^2/3) (1 - 1/(s+1)^2).
    const auto mix = NumberBasisState::mixture({0.25, 0.25, 0.5});
    for (int s : {9, 99, 400}) {
        const auto r = finite_s_operator_check(mix, s);
        const double dim = static_cast<double>(s + 1);
        CHECK_THAT(r.mean, WithinAbs(kPi * s / dim, 1e-12));
        CHECK_THAT(r.variance,
                   WithinAbs(kPi * kPi / 3.0 * (1.0 - 1.0 / (dim * dim)), 1e-12));
    }
    // The vacuum is pure but its single coefficient also gives a flat spectrum.
    const auto vac = NumberBasisState::coherent(CoherentSpec(0.0));
    const auto r = finite_s_operator_check(vac, 99);
    CHECK_THAT(r.mean, WithinAbs(kPi * 99.0 / 100.0, 1e-12));
    CHECK_THAT(r.variance,
               WithinAbs(kPi * kPi / 3.0 * (1.0 - 1.0 / 10000.0), 1e-12));
}

TEST_CASE("finite-dimension statistics approach the continuous limit") {
    const auto state = NumberBasisState::coherent(CoherentSpec(4.0, kPi));
    const auto dist = build_distribution(state);
    const double m1 = moment(dist, 1).value;
    const double var = moment(dist, 2).value - m1 * m1;

    const auto r = finite_s_operator_check(state, 2000);
    // The density is symmetric about pi, so pairing eigenvalues x and 2pi - x
    // gives mean = pi (1 - q0) exactly: the residual O(P(0)/s) offset comes
    // from the single unpaired eigenvalue at the window edge.
    const double q0 = kTwoPi * eval_density(dist, 0.0) / 2001.0;
    CHECK_THAT(r.mean, WithinAbs(kPi * (1.0 - q0), 1e-7));
    CHECK_THAT(r.variance, WithinAbs(var, 1e-8));
}
