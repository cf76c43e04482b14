#pragma once

#include <span>
#include <vector>

#include "atlas/spectral.hpp"

namespace atlas {

// One point of the logistic family 0 = dI*lap(u) + (l*beta*(1-dI*u) - gamma)*u
// together with its parameter derivative v = du/dl.
struct LogisticPoint {
    double l = 0.0;
    Field u;
    Field v;
    double int_u = 0.0;  // integral of u
    double int_lv = 0.0; // l * integral of v
    Field z;             // l * (1 - dI*u)
};

// Near-threshold data: u^l ~ (l - l*) * c_star * phi1 as l -> l*, and the
// slope of N_dI at l*.
struct ThresholdExpansion {
    double c_star = 0.0;
    double slope_at_l_star = 0.0;
};

Field solve_u(const CoefficientSet& coeffs, const EigenPair& eig, double l, const Field* warm_start = nullptr);

Field solve_v(const CoefficientSet& coeffs, double l, const Field& u);

ThresholdExpansion threshold_expansion(const CoefficientSet& coeffs, const EigenPair& eig);

LogisticPoint logistic_point(const CoefficientSet& coeffs, const EigenPair& eig, double l,
                             const Field* warm_start = nullptr);

// Sequential warm-started solves; verifies nodewise monotonicity in l.
std::vector<LogisticPoint> continuation_sweep(const CoefficientSet& coeffs, const EigenPair& eig,
                                              std::span<const double> l_values);

// Residual of the logistic equation at u, in the max norm.
double logistic_residual(const CoefficientSet& coeffs, double l, const Field& u);

} // namespace atlas
