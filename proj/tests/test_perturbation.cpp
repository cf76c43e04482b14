#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "atlas/perturbation.hpp"

using namespace atlas;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("build_model: eps bound, rejection, endpoint value") {
    Grid g = build_grid(1.0, 501);
    PerturbedModel m = build_model(1.0, 1, 1.0, 0.3, 1.0, g);
    CHECK(m.eps_bound == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(build_model(1.0, 1, 1.0, 0.8, 1.0, g), ConfigError);
    CHECK_THROWS_AS(build_model(1.0, 1, 0.0, 0.1, 1.0, g), ConfigError);
    CHECK_THROWS_AS(build_model(1.0, 0, 1.0, 0.1, 1.0, g), ConfigError);

    // gamma(0) = beta(0)^2 = (1 + eps sqrt(2))^2
    const double expected = std::pow(1.0 + 0.3 * std::sqrt(2.0), 2.0);
    CHECK(m.gamma.values[0] == doctest::Approx(expected).epsilon(1e-13));
    for (std::size_t i = 0; i < m.beta.values.size(); ++i)
        CHECK(m.gamma.values[i] == doctest::Approx(m.beta.values[i] * m.beta.values[i]).epsilon(1e-14));
}

TEST_CASE("closed-form expansion coefficients") {
    Grid g = build_grid(1.0, 1001);
    PerturbedModel m = build_model(1.0, 1, 1.0, 0.05, 0.15, g);
    ExpansionCoefficients cf = closed_form_expansion(m);
    CHECK(cf.l0 == 1.0);
    CHECK(std::abs(cf.l1) <= 1e-13);

    const double lambda1 = kPi * kPi;
    CHECK(cf.l2 == doctest::Approx(1.0 - 1.0 / (0.15 * lambda1)).epsilon(1e-10));
    CHECK(cf.phi1_tilde.values[0] == doctest::Approx(-std::sqrt(2.0) / (0.15 * lambda1)).epsilon(1e-10));
    CHECK(std::abs(integrate(cf.phi1_tilde)) <= 1e-12);

    // l2 vanishes exactly at dI lambda_m = k^2 and flips sign with it.
    PerturbedModel mz = build_model(1.0, 1, 1.0, 0.05, 1.0 / lambda1, g);
    CHECK(std::abs(closed_form_expansion(mz).l2) <= 1e-12);
    PerturbedModel mneg = build_model(1.0, 1, 1.0, 0.05, 0.5 / lambda1, g);
    CHECK(closed_form_expansion(mneg).l2 < 0.0);
}

TEST_CASE("expansion consistency: bounded remainder and first-order law") {
    Grid g = build_grid(1.0, 1001);
    PerturbedModel base = build_model(1.0, 1, 1.0, 0.05, 0.15, g);
    const double eps_seq[] = {0.05, 0.025, 0.0125};
    ExpansionConsistency ec = expansion_consistency(base, eps_seq);
    CHECK(ec.bounded);
    CHECK(ec.ratio <= 10.0);
    CHECK(ec.first_order);

    // For odd modes l*(eps) is even in eps, so remainder/eps^3 ~ eps * l4:
    // successive halvings should roughly halve it.
    CHECK(ec.remainder[0] / ec.remainder[1] == doctest::Approx(2.0).epsilon(0.15));

    const double too_big[] = {0.3};
    CHECK_THROWS_AS(expansion_consistency(base, too_big), ConfigError);
}

TEST_CASE("regime labels and sign predictions") {
    Grid g = build_grid(1.0, 501);
    RegimeReport fwd = regime_report(1.0, 1, 0.15, g, 0.05);
    CHECK(fwd.regime == Regime::Forward);
    CHECK(fwd.dI_lambda == doctest::Approx(0.15 * kPi * kPi).epsilon(1e-13));
    CHECK(fwd.tth1_predicted == 1);
    CHECK(fwd.tth2_predicted == 1);
    CHECK(fwd.tth1 > 0.0);
    CHECK(fwd.tth2 > 0.0);
    CHECK(fwd.signs_match);
    CHECK(fwd.slope_at_l_star > 0.0);

    RegimeReport bwd = regime_report(1.0, 1, 0.25, g, 0.05);
    CHECK(bwd.regime == Regime::Backward);
    CHECK(bwd.tth2_predicted == -1);
    CHECK(bwd.tth2 < 0.0);
    CHECK(bwd.signs_match);
    CHECK(bwd.slope_at_l_star < 0.0);

    RegimeReport boundary = regime_report(1.0, 1, 2.0 / (kPi * kPi), g, 0.05);
    CHECK(boundary.regime == Regime::Boundary);
    CHECK(boundary.tth2_predicted == 0);

    RegimeReport neither = regime_report(1.0, 1, 0.05, g, 0.05);
    CHECK(neither.regime == Regime::Neither); // dI lambda < k^2
    CHECK(neither.tth1_predicted == -1);
    CHECK(neither.tth1 < 0.0);
}

TEST_CASE("stabilized regime reports on both acceptance models") {
    Grid g = build_grid(1.0, 501);
    RegimeReport fwd = stabilized_regime(1.0, 1, 0.15, g);
    CHECK(fwd.regime == Regime::Forward);
    CHECK(fwd.signs_match);
    CHECK(fwd.eps <= 0.1 / std::sqrt(0.5) + 1e-12);

    RegimeReport bwd = stabilized_regime(1.0, 1, 0.25, g);
    CHECK(bwd.regime == Regime::Backward);
    CHECK(bwd.signs_match);
}

TEST_CASE("hypothesis checks") {
    Grid g = build_grid(1.0, 501);

    // gamma = beta^2 nonconstant makes avg(gamma/beta) < avg gamma / avg beta.
    PerturbedModel m = build_model(1.0, 1, 1.0, 0.1, 0.15, g);
    CoefficientSet cm = to_coefficients(m);
    EigenPair em = principal_pair(cm);
    HypothesisChecks h = check_hypotheses(cm, em);
    CHECK(h.assumption_a);
    CHECK(h.lem2_eq3);
    CHECK(h.t2_eq1);      // forward example
    CHECK_FALSE(h.t2_2_eq1);

    PerturbedModel mb = build_model(1.0, 1, 1.0, 0.1, 0.25, g);
    CoefficientSet cb = to_coefficients(mb);
    HypothesisChecks hb = check_hypotheses(cb, principal_pair(cb));
    CHECK(hb.t2_2_eq1);   // backward example
    CHECK_FALSE(hb.t2_eq1);

    CoefficientSet cc = make_coefficients(g, Field(g, 2.0), Field(g, 1.0), 1.0, 0.0);
    HypothesisChecks hc = check_hypotheses(cc, principal_pair(cc));
    CHECK_FALSE(hc.assumption_a);
    CHECK_FALSE(hc.lem2_eq3);
    CHECK_FALSE(hc.t2_2_eq1);
    CHECK_FALSE(hc.t2_eq1);
}

TEST_CASE("eigenfunction expansion agreement at order eps") {
    Grid g = build_grid(1.0, 1001);
    PerturbedModel base = build_model(1.0, 1, 1.0, 0.05, 0.15, g);
    ExpansionCoefficients cf = closed_form_expansion(base);

    auto expansion_error = [&](double eps) {
        PerturbedModel m = build_model(1.0, 1, 1.0, eps, 0.15, g);
        CoefficientSet c = to_coefficients(m);
        EigenPair e = principal_pair(c);
        const double int_phi = integrate(e.phi1);
        double err = 0.0;
        for (std::size_t i = 0; i < e.phi1.values.size(); ++i) {
            const double tilde = e.phi1.values[i] / int_phi;
            err = std::max(err, std::abs(tilde - 1.0 - eps * cf.phi1_tilde.values[i]));
        }
        return err;
    };
    const double e1 = expansion_error(0.04), e2 = expansion_error(0.02);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25)); // O(eps^2) remainder
}
