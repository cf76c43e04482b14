#include "atlas/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace atlas {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

PerturbedModel build_model(double k, int m, double cM, double eps, double dI, const Grid& g) {
    if (!(k > 0.0)) throw ConfigError("build_model: k must be positive");
    if (m < 1) throw ConfigError("build_model: mode index m must be >= 1");
    if (cM == 0.0) throw ConfigError("build_model: cM must be nonzero");
    if (!(dI > 0.0)) throw ConfigError("build_model: dI must be positive");

    LaplaceMode mode = laplace_mode(g, m);
    PerturbedModel model;
    model.k = k;
    model.m = m;
    model.cM = cM;
    model.dI = dI;
    model.grid = &g;
    model.h = Field(g);
    for (std::size_t i = 0; i < model.h.values.size(); ++i) model.h.values[i] = cM * mode.phi.values[i];
    model.eps_bound = k / max_abs(model.h);
    if (!(eps > 0.0 && eps < model.eps_bound))
        throw ConfigError("build_model: eps must lie in (0, " + std::to_string(model.eps_bound) +
                          ") to keep beta positive");
    model.eps = eps;
    model.beta = Field(g);
    model.gamma = Field(g);
    for (std::size_t i = 0; i < model.beta.values.size(); ++i) {
        model.beta.values[i] = k + eps * model.h.values[i];
        model.gamma.values[i] = model.beta.values[i] * model.beta.values[i];
    }
    return model;
}

CoefficientSet to_coefficients(const PerturbedModel& model, double dS) {
    return make_coefficients(*model.grid, model.beta, model.gamma, model.dI, dS);
}

ExpansionCoefficients closed_form_expansion(const PerturbedModel& model) {
    const Grid& g = *model.grid;
    LaplaceMode mode = laplace_mode(g, model.m);
    Field h2(g);
    for (std::size_t i = 0; i < h2.values.size(); ++i) h2.values[i] = model.h.values[i] * model.h.values[i];

    ExpansionCoefficients out;
    out.l0 = model.k;
    out.l1 = average(model.h);
    out.l2 = (1.0 - model.k * model.k / (model.dI * mode.lambda)) * average(h2) / model.k;
    out.phi1_tilde = Field(g);
    const double scale = -model.k / (g.length * model.dI * mode.lambda);
    for (std::size_t i = 0; i < out.phi1_tilde.values.size(); ++i)
        out.phi1_tilde.values[i] = scale * model.h.values[i];
    return out;
}

ExpansionConsistency expansion_consistency(const PerturbedModel& model, std::span<const double> eps_seq) {
    if (eps_seq.empty()) throw ConfigError("expansion_consistency: empty eps sequence");
    for (double e : eps_seq)
        if (!(e > 0.0 && e <= 0.1000001 * model.eps_bound))
            throw ConfigError("expansion_consistency: eps values must be small, <= 0.1 * eps_bound");

    ExpansionCoefficients cf = closed_form_expansion(model);
    ExpansionConsistency out;
    out.first_order = true;
    for (double e : eps_seq) {
        PerturbedModel pm = build_model(model.k, model.m, model.cM, e, model.dI, *model.grid);
        CoefficientSet coeffs = to_coefficients(pm);
        EigenPair eig = principal_pair(coeffs);
        const double ls = eig.l_star;
        out.eps.push_back(e);
        out.l_star_eps.push_back(ls);
        out.remainder.push_back((ls - cf.l0 - e * cf.l1 - e * e * cf.l2) / (e * e * e));
        if (std::abs(ls - model.k) > 2.0 * std::abs(cf.l2) * e * e) out.first_order = false;
    }
    double amax = 0.0, amin = std::numeric_limits<double>::infinity();
    for (double r : out.remainder) {
        amax = std::max(amax, std::abs(r));
        amin = std::min(amin, std::abs(r));
    }
    out.ratio = (amin > 0.0) ? amax / amin : std::numeric_limits<double>::infinity();
    out.bounded = out.ratio <= 10.0;
    return out;
}

HypothesisChecks check_hypotheses(const CoefficientSet& coeffs, const EigenPair& eig) {
    const Grid& g = *coeffs.grid;
    const std::size_t n = static_cast<std::size_t>(g.n);

    double int_gb = 0.0, int_b = 0.0, int_g = 0.0;
    double int_p = 0.0, int_bp2 = 0.0, int_bp3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = g.weights[i], b = coeffs.beta.values[i], c = coeffs.gamma.values[i];
        const double p = eig.phi1.values[i];
        int_gb += w * c / b;
        int_b += w * b;
        int_g += w * c;
        int_p += w * p;
        int_bp2 += w * b * p * p;
        int_bp3 += w * b * p * p * p;
    }
    const double L = g.length;
    HypothesisChecks out;
    out.assumption_a = beta_gamma_variation(coeffs) > 1e-10;
    out.tth1 = eig.l_star - int_gb / L;
    out.tth2 = int_bp3 / L - (int_p / L) * (int_bp2 / L);

    // Ties (constant coefficients make these equalities) count as false.
    const double lem_lhs = int_gb / L, lem_rhs = (int_g / L) / (int_b / L);
    out.lem2_eq3 = lem_rhs - lem_lhs > 1e-12 * (std::abs(lem_lhs) + std::abs(lem_rhs));
    const double tth2_tol = 1e-12 * (std::abs(int_bp3) + std::abs(int_p * int_bp2 / L)) / L;
    out.t2_2_eq1 = out.tth2 < -tth2_tol;
    out.t2_eq1 = ((int_gb / L) * eig.r1 < 1.0 - 1e-12) && (out.tth2 > tth2_tol);
    return out;
}

RegimeReport regime_report(double k, int m, double dI, const Grid& g, double eps, double cM) {
    PerturbedModel model = build_model(k, m, cM, eps, dI, g);
    CoefficientSet coeffs = to_coefficients(model);
    EigenPair eig = principal_pair(coeffs);
    HypothesisChecks checks = check_hypotheses(coeffs, eig);
    LaplaceMode mode = laplace_mode(g, m);

    RegimeReport rep;
    rep.dI_lambda = dI * mode.lambda;
    rep.eps = eps;
    const double k2 = k * k;
    const double rel1 = std::abs(rep.dI_lambda - k2) / k2;
    const double rel2 = std::abs(rep.dI_lambda - 2.0 * k2) / (2.0 * k2);
    if (rel1 <= 1e-9 || rel2 <= 1e-9)
        rep.regime = Regime::Boundary;
    else if (rep.dI_lambda > k2 && rep.dI_lambda < 2.0 * k2)
        rep.regime = Regime::Forward;
    else if (rep.dI_lambda > 2.0 * k2)
        rep.regime = Regime::Backward;
    else
        rep.regime = Regime::Neither;

    rep.tth1_predicted = (rel1 <= 1e-9) ? 0 : (rep.dI_lambda > k2 ? 1 : -1);
    rep.tth2_predicted = (rel2 <= 1e-9) ? 0 : (rep.dI_lambda < 2.0 * k2 ? 1 : -1);

    rep.assumption_a = checks.assumption_a;
    rep.lem2_eq3 = checks.lem2_eq3;
    rep.tth1 = checks.tth1;
    rep.tth2 = checks.tth2;
    rep.signs_match = (rep.tth1_predicted == 0 || sign_of(rep.tth1) == rep.tth1_predicted) &&
                      (rep.tth2_predicted == 0 || sign_of(rep.tth2) == rep.tth2_predicted);
    rep.slope_at_l_star = threshold_expansion(coeffs, eig).slope_at_l_star;
    return rep;
}

RegimeReport stabilized_regime(double k, int m, double dI, const Grid& g, double cM) {
    LaplaceMode mode = laplace_mode(g, m);
    const double bound = k / (std::abs(cM) * max_abs(mode.phi));
    double eps = 0.1 * bound;
    RegimeReport prev = regime_report(k, m, dI, g, eps, cM);
    for (int halving = 0; halving < 20; ++halving) {
        eps *= 0.5;
        RegimeReport cur = regime_report(k, m, dI, g, eps, cM);
        // Signs agreeing across a halving confirm them at the larger eps.
        if (sign_of(cur.tth1) == sign_of(prev.tth1) && sign_of(cur.tth2) == sign_of(prev.tth2)) return prev;
        prev = cur;
    }
    throw SolverFailure("stabilized_regime: TTH signs did not stabilize while halving eps");
}

} // namespace atlas
