#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "atlas/logistic.hpp"

namespace atlas {

// One sample of the equilibrium-counting curves
//   N_dI(l)    = (l / (l* |Omega|)) * int(1 - dI*u^l)
//   N_dIdS(l)  = N_dI(l) + (dS*l / (l* |Omega|)) * int(u^l)
// with the analytic slope d N_dIdS / dl = (|Omega| + (dS-dI) int(l v^l + u^l)) / (l* |Omega|).
struct CurveSample {
    double l = 0.0;
    double n_di = 0.0;
    double n_dids = 0.0;
    double slope = 0.0;
    double int_u = 0.0;
    double int_lv = 0.0;
};

struct Thresholds {
    double r0_low = 0.0;        // inf over l >= l* of N_dI
    double r0_low_scan = 0.0;   // refined scan minimum
    double r0_low_tail = 0.0;   // analytic tail limit avg(gamma/beta) * R1
    bool r0_low_at_tail = false;
    double m_star_big = 0.0;    // M* = (dI/|Omega|) sup int(u^l + l v^l)
    double d_low = 0.0;         // (1 - 1/M*) dI
    std::vector<double> segment_breaks;             // interior critical points l*_2 < ... < l*_m
    std::optional<std::array<double, 3>> r0_thresh; // (R0,1  R0,2  R0,3) when dS given and m >= 3
};

struct EquilibriumRoot {
    double l = 0.0;
    Field S; // l (1 - dI u^l)
    Field I; // dS l u^l
    double slope = 0.0;
    bool degenerate = false;
    bool is_minimal = false;
    bool is_maximal = false;
};

struct EquilibriumSet {
    double r0 = 0.0;
    double dS = 0.0;
    std::vector<EquilibriumRoot> roots;
    int count = 0;
};

CurveSample eval_curve(const CoefficientSet& coeffs, const EigenPair& eig, double l);
CurveSample eval_curve(const CoefficientSet& coeffs, const EigenPair& eig, double l, double dS,
                       const Field* warm_start = nullptr);

// Analytic l -> infinity limit of the N_dIdS slope, dS / (dI l*).
double slope_limit_check(const CoefficientSet& coeffs, const EigenPair& eig, double dS);

Thresholds compute_thresholds(const CoefficientSet& coeffs, const EigenPair& eig,
                              std::optional<double> dS = std::nullopt);

EquilibriumSet classify(const CoefficientSet& coeffs, const EigenPair& eig, double r0, double dS);

// (r0, int I, l) triples along lGrid; the plotted bifurcation curve.
std::vector<std::array<double, 3>> bifurcation_diagram(const CoefficientSet& coeffs, const EigenPair& eig,
                                                       double dS, std::span<const double> l_grid);

// d1* of the existence proof, evaluated at the scan minimum of N_dI:
// (r0 - N_dI(l0)) |Omega| l* / (l0 int u^{l0}). Requires r0 above that minimum.
double d1_star(const CoefficientSet& coeffs, const EigenPair& eig, double r0);

} // namespace atlas
