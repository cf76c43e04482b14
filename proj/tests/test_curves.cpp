#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "atlas/curves.hpp"
#include "atlas/perturbation.hpp"

using namespace atlas;

namespace {

CoefficientSet constant_model(const Grid& g, double dS = 0.0) {
    CoefficientSet c = make_coefficients(g, Field(g, 2.0), Field(g, 1.0), 1.0, dS);
    return c;
}

// The two appendix models at the amplitude used by the acceptance suite.
CoefficientSet forward_model(const Grid& g, double dS = 0.0) {
    return to_coefficients(build_model(1.0, 1, 1.0, 0.25, 0.15, g), dS);
}

CoefficientSet backward_model(const Grid& g, double dS = 0.0) {
    return to_coefficients(build_model(1.0, 1, 1.0, 0.25, 0.25, g), dS);
}

} // namespace

TEST_CASE("eval_curve closed forms on constants") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = constant_model(g, 1.0);
    EigenPair e = principal_pair(c);

    for (double l : {0.51, 1.0, 3.0, 50.0}) {
        CurveSample s = eval_curve(c, e, l, 0.0);
        CHECK(s.n_di == doctest::Approx(1.0).epsilon(1e-11));
    }
    CurveSample s1 = eval_curve(c, e, 1.0); // dS from the model = 1
    CHECK(s1.n_dids == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(s1.slope == doctest::Approx(2.0).epsilon(1e-10)); // (1 + dS - dI)/l*

    CurveSample limit = eval_curve(c, e, e.l_star);
    CHECK(limit.n_di == 1.0);
    CHECK(limit.n_dids == 1.0);
    CHECK(limit.slope == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(eval_curve(c, e, 0.4), ConfigError);
}

TEST_CASE("definition consistency at sampled l") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = forward_model(g, 0.37);
    EigenPair e = principal_pair(c);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int t = 0; t < 8; ++t) {
        const double l = e.l_star * (1.0 + std::pow(10.0, -2.0 + 3.0 * dist(rng)));
        CurveSample s = eval_curve(c, e, l, 0.37);
        const double reconstructed = s.n_di + 0.37 * s.l * s.int_u / (e.l_star * g.length);
        CHECK(std::abs(s.n_dids - reconstructed) <= 1e-12 * std::abs(s.n_dids));
        CHECK(s.n_di > 0.0);
    }
}

TEST_CASE("slope formula vs central finite differences") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = forward_model(g);
    EigenPair e = principal_pair(c);
    const double dS = 0.02;
    for (double factor : {1.3, 2.4, 11.0}) {
        const double l = factor * e.l_star;
        CurveSample s = eval_curve(c, e, l, dS);
        const double delta = 1e-5 * l;
        const double np = eval_curve(c, e, l + delta, dS).n_dids;
        const double nm = eval_curve(c, e, l - delta, dS).n_dids;
        const double fd = (np - nm) / (2.0 * delta);
        CHECK(std::abs(fd - s.slope) <= 1e-4 * std::abs(s.slope));
    }
}

TEST_CASE("slope limit check") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = constant_model(g);
    EigenPair e = principal_pair(c);
    CHECK(slope_limit_check(c, e, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(slope_limit_check(c, e, 0.0) == 0.0);
    CHECK(eval_curve(c, e, 1e4 * e.l_star, 1.0).slope ==
          doctest::Approx(slope_limit_check(c, e, 1.0)).epsilon(0.05));

    CoefficientSet b = backward_model(g);
    EigenPair eb = principal_pair(b);
    const double limit = slope_limit_check(b, eb, 0.01);
    CHECK(eval_curve(b, eb, 1e4 * eb.l_star, 0.01).slope == doctest::Approx(limit).epsilon(0.05));
}

TEST_CASE("endpoint identities on both appendix models") {
    Grid g = build_grid(1.0, 501);
    for (bool forward : {true, false}) {
        CoefficientSet c = forward ? forward_model(g) : backward_model(g);
        EigenPair e = principal_pair(c);
        CHECK(eval_curve(c, e, e.l_star, 0.0).n_di == 1.0);
        CHECK(std::abs(eval_curve(c, e, e.l_star * (1.0 + 1e-6), 0.0).n_di - 1.0) <= 1e-6);

        Field ratio(g);
        for (int i = 0; i < g.n; ++i)
            ratio.values[static_cast<std::size_t>(i)] =
                c.gamma.values[static_cast<std::size_t>(i)] / c.beta.values[static_cast<std::size_t>(i)];
        const double tail = average(ratio) * e.r1;
        CHECK(std::abs(eval_curve(c, e, 1e4 * e.l_star, 0.0).n_di - tail) <= 1e-3);
    }
}

TEST_CASE("thresholds on constants") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = constant_model(g);
    EigenPair e = principal_pair(c);
    Thresholds th = compute_thresholds(c, e);
    CHECK(th.r0_low == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(th.m_star_big == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(th.d_low) <= 1e-8);
    CHECK(th.segment_breaks.empty());
    CHECK_FALSE(th.r0_thresh.has_value());
}

TEST_CASE("thresholds on the backward model") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = backward_model(g);
    EigenPair e = principal_pair(c);
    Thresholds th = compute_thresholds(c, e);
    CHECK(th.r0_low < 1.0);
    CHECK(th.r0_low > 0.9);
    CHECK(th.d_low > 0.0);
    CHECK(th.d_low < c.dI);
    CHECK(th.r0_low <= std::min(1.0, th.r0_low_tail) + 1e-12);

    // Below d_low the curve is non-monotone and multiplicity appears.
    Thresholds tlow = compute_thresholds(c, e, th.d_low / 2.0);
    REQUIRE(tlow.segment_breaks.size() >= 1);
    const double dip_value = eval_curve(c, e, tlow.segment_breaks.front(), th.d_low / 2.0).n_dids;
    CHECK(dip_value < 1.0);
    const double r0 = 0.5 * (dip_value + 1.0);
    EquilibriumSet eq = classify(c, e, r0, th.d_low / 2.0);
    CHECK(eq.count >= 2);
}

TEST_CASE("thresholds on the forward model with small dS") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = forward_model(g);
    EigenPair e = principal_pair(c);
    Thresholds th = compute_thresholds(c, e, 2e-4);
    REQUIRE(th.r0_thresh.has_value());
    const auto [r01, r02, r03] = *th.r0_thresh;
    CHECK(r01 < 1.0);
    CHECK(1.0 < r02);
    CHECK(r02 <= r03 + 1e-12);
    CHECK(th.segment_breaks.size() >= 2);
}

TEST_CASE("classify on constants") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = constant_model(g, 1.0);
    EigenPair e = principal_pair(c);

    EquilibriumSet eq = classify(c, e, 2.0, 1.0);
    REQUIRE(eq.count == 1);
    const EquilibriumRoot& root = eq.roots.front();
    CHECK(root.l == doctest::Approx(1.0).epsilon(1e-10));
    for (std::size_t i = 0; i < root.S.values.size(); ++i) {
        CHECK(root.S.values[i] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(root.I.values[i] == doctest::Approx(0.5).epsilon(1e-9));
    }
    CHECK(root.is_minimal);
    CHECK(root.is_maximal);
    CHECK_FALSE(root.degenerate);

    double mass = 0.0;
    for (std::size_t i = 0; i < root.S.values.size(); ++i)
        mass += g.weights[i] * (root.S.values[i] + root.I.values[i]);
    CHECK(mass == doctest::Approx(2.0 * e.l_star * g.length).epsilon(1e-9));

    CHECK(classify(c, e, 0.9, 1.0).count == 0);
    CHECK_THROWS_AS(classify(c, e, -1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(classify(c, e, 2.0, 0.0), ConfigError);

    // dS > d_low = 0: exactly one root iff r0 > 1.
    for (double r0 : {0.5, 0.9, 1.0}) CHECK(classify(c, e, r0, 1.0).count == 0);
    for (double r0 : {1.1, 2.0, 5.0}) CHECK(classify(c, e, r0, 1.0).count == 1);
}

TEST_CASE("classify near a fold reports a degenerate root") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = backward_model(g);
    EigenPair e = principal_pair(c);
    Thresholds th = compute_thresholds(c, e);
    const double dS = th.d_low / 2.0;
    Thresholds tlow = compute_thresholds(c, e, dS);
    REQUIRE(!tlow.segment_breaks.empty());
    const double fold_l = tlow.segment_breaks.front();
    const double fold_value = eval_curve(c, e, fold_l, dS).n_dids;

    EquilibriumSet eq = classify(c, e, fold_value, dS);
    bool has_degenerate = false;
    for (const EquilibriumRoot& r : eq.roots)
        if (r.degenerate && std::abs(r.l - fold_l) <= 1e-4 * fold_l) has_degenerate = true;
    CHECK(has_degenerate);
}

TEST_CASE("root I-profiles are ordered and flagged min/max") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = backward_model(g);
    EigenPair e = principal_pair(c);
    Thresholds th = compute_thresholds(c, e);
    const double dS = th.d_low / 2.0;
    Thresholds tlow = compute_thresholds(c, e, dS);
    const double dip = eval_curve(c, e, tlow.segment_breaks.front(), dS).n_dids;
    EquilibriumSet eq = classify(c, e, 0.5 * (dip + 1.0), dS);
    REQUIRE(eq.count >= 2);
    CHECK(eq.roots.front().is_minimal);
    CHECK(eq.roots.back().is_maximal);
    for (std::size_t i = 0; i < eq.roots.front().I.values.size(); ++i)
        CHECK(eq.roots.front().I.values[i] < eq.roots.back().I.values[i]);
}

TEST_CASE("bifurcation diagram on constants is the exact line") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = constant_model(g, 1.0);
    EigenPair e = principal_pair(c);
    std::vector<double> l_grid;
    for (double l = 0.55; l <= 3.0; l += 0.05) l_grid.push_back(l);
    auto rows = bifurcation_diagram(c, e, 1.0, l_grid);
    REQUIRE(rows.size() == l_grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i][0] == doctest::Approx(2.0 * l_grid[i]).epsilon(1e-10));
        CHECK(rows[i][1] == doctest::Approx(l_grid[i] - 0.5).epsilon(1e-9));
        CHECK(rows[i][2] == l_grid[i]);
    }
    std::vector<double> bad = {1.0, 0.9};
    CHECK_THROWS_AS(bifurcation_diagram(c, e, 1.0, bad), ConfigError);
}

TEST_CASE("forward model bifurcation diagram changes slope sign at least twice") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = forward_model(g);
    EigenPair e = principal_pair(c);
    std::vector<double> l_grid;
    for (double lf = 1e-4; lf < 400.0; lf *= 1.05) l_grid.push_back(e.l_star * (1.0 + lf));
    auto rows = bifurcation_diagram(c, e, 2e-4, l_grid);
    int sign_changes = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double diff = rows[i][0] - rows[i - 1][0];
        const int s = (diff > 0.0) - (diff < 0.0);
        if (s != 0 && last_sign != 0 && s != last_sign) ++sign_changes;
        if (s != 0) last_sign = s;
    }
    CHECK(sign_changes >= 2);
}

TEST_CASE("backward diagram initially decreasing") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = backward_model(g);
    EigenPair e = principal_pair(c);
    Thresholds th = compute_thresholds(c, e);
    std::vector<double> l_grid;
    for (double lf = 1e-4; lf < 1e-2; lf *= 1.3) l_grid.push_back(e.l_star * (1.0 + lf));
    auto rows = bifurcation_diagram(c, e, th.d_low / 4.0, l_grid);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][0] < rows[i - 1][0]);
}

TEST_CASE("d1_star is positive and admissible") {
    Grid g = build_grid(1.0, 401);
    CoefficientSet c = backward_model(g);
    EigenPair e = principal_pair(c);
    Thresholds th = compute_thresholds(c, e);
    const double r0 = 0.5 * (th.r0_low + 1.0);
    const double d1 = d1_star(c, e, r0);
    CHECK(d1 > 0.0);
    // At dS well below d1*, both Theorem-2.1-type equilibria exist.
    EquilibriumSet eq = classify(c, e, r0, 0.01 * d1);
    CHECK(eq.count >= 2);
    CHECK_THROWS_AS(d1_star(c, e, th.r0_low * 0.5), ConfigError);
}
