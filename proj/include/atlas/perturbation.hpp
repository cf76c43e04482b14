#pragma once

#include <span>
#include <vector>

#include "atlas/logistic.hpp"

namespace atlas {

// The constructive family beta = k + eps*h with h = cM*phi_m and gamma = beta^2.
struct PerturbedModel {
    double k = 0.0;
    int m = 0;
    double cM = 0.0;
    double eps = 0.0;
    double dI = 0.0;
    const Grid* grid = nullptr;
    Field h;
    Field beta;
    Field gamma;
    double eps_bound = 0.0; // eps_{k,h} = k / max|h|
};

PerturbedModel build_model(double k, int m, double cM, double eps, double dI, const Grid& g);

CoefficientSet to_coefficients(const PerturbedModel& model, double dS = 0.0);

// Closed forms of the eigenvalue expansion l*(eps) = l0 + eps l1 + eps^2 l2 + ...
// for modal h: l0 = k, l1 = mean(h) = 0, l2 = (1 - k^2/(dI lambda_m)) mean(h^2) / k,
// and the first eigenfunction correction -k h / (|Omega| dI lambda_m).
struct ExpansionCoefficients {
    double l0 = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    Field phi1_tilde;
};

ExpansionCoefficients closed_form_expansion(const PerturbedModel& model);

struct ExpansionConsistency {
    std::vector<double> eps;
    std::vector<double> l_star_eps;
    std::vector<double> remainder; // (l*(eps) - l0 - eps l1 - eps^2 l2) / eps^3
    double ratio = 0.0;            // max|remainder| / min|remainder|
    bool bounded = false;          // ratio <= 10
    bool first_order = false;      // |l*(eps) - k| <= 2 |l2| eps^2 throughout
};

ExpansionConsistency expansion_consistency(const PerturbedModel& model, std::span<const double> eps_seq);

enum class Regime { Forward, Backward, Boundary, Neither };

struct RegimeReport {
    double dI_lambda = 0.0;
    Regime regime = Regime::Neither;
    double eps = 0.0;
    bool assumption_a = false;
    bool lem2_eq3 = false;
    double tth1 = 0.0; // 1/R1 - avg(gamma/beta)
    double tth2 = 0.0; // avg(beta phi1^3) - avg(phi1) avg(beta phi1^2)
    int tth1_predicted = 0; // -1/0/+1; 0 means no prediction (boundary case)
    int tth2_predicted = 0;
    bool signs_match = false;
    double slope_at_l_star = 0.0;
};

RegimeReport regime_report(double k, int m, double dI, const Grid& g, double eps, double cM = 1.0);

// Halves eps from 0.1 * eps_{k,h} until the computed TTH signs agree across
// two consecutive halvings; returns the report at the stabilized eps.
RegimeReport stabilized_regime(double k, int m, double dI, const Grid& g, double cM = 1.0);

struct HypothesisChecks {
    bool assumption_a = false; // beta/gamma nonconstant
    bool lem2_eq3 = false;     // avg(gamma/beta) < avg(gamma)/avg(beta)
    bool t2_2_eq1 = false;     // avg(beta phi^3) < avg(phi) avg(beta phi^2)
    bool t2_eq1 = false;       // avg(gamma/beta) R1 < 1 and the reversed cubic inequality
    double tth1 = 0.0;
    double tth2 = 0.0;
};

HypothesisChecks check_hypotheses(const CoefficientSet& coeffs, const EigenPair& eig);

} // namespace atlas
