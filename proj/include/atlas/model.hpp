#pragma once

#include <optional>

#include "atlas/errors.hpp"
#include "atlas/grid.hpp"

namespace atlas {

// Solver knobs, surfaced through the CLI config so runs are reproducible.
struct SolverOptions {
    double eigen_stagnation = 1e-12;     // relative Rayleigh-quotient stagnation
    int eigen_max_iterations = 100000;
    double newton_tol_factor = 1e-11;    // residual tolerance is factor * max(1, l)
    int newton_max_iterations = 100;
    int newton_max_halvings = 30;
    double r1_inverse_tol = 1e-8;
    double root_tol = 1e-9;              // |N(l) - r0| at an accepted root
    double degenerate_slope_tol = 1e-7;
    int scan_per_decade = 400;
    double scan_start_offset = 1e-6;     // scan begins at l*(1 + offset)
    double scan_max_factor = 1e4;        // default scan end l*(factor)
    double fixed_point_stagnation = 1e-10;
    double sim_growth = 1.2;
    int sim_max_halvings = 40;
    double sim_stagnation = 1e-9;
};

// One model instance: sampled rates, diffusion rates and the total mass
// (or equivalently R0; the other is derived once l* = 1/R1 is known).
struct CoefficientSet {
    const Grid* grid = nullptr;
    Field beta;
    Field gamma;
    double dI = 0.0;
    double dS = 0.0;
    std::optional<double> total_mass;
    std::optional<double> r0;
    SolverOptions opts;
};

inline CoefficientSet make_coefficients(const Grid& g, Field beta, Field gamma, double dI, double dS) {
    if (beta.grid != &g || gamma.grid != &g) throw ConfigError("coefficients: fields live on a different grid");
    for (double b : beta.values)
        if (!(b > 0.0)) throw ConfigError("coefficients: beta must be strictly positive");
    for (double c : gamma.values)
        if (!(c > 0.0)) throw ConfigError("coefficients: gamma must be strictly positive");
    if (!(dI > 0.0)) throw ConfigError("coefficients: dI must be positive");
    if (dS < 0.0) throw ConfigError("coefficients: dS must be nonnegative");
    CoefficientSet c;
    c.grid = &g;
    c.beta = std::move(beta);
    c.gamma = std::move(gamma);
    c.dI = dI;
    c.dS = dS;
    return c;
}

inline CoefficientSet with_mass(CoefficientSet c, double total_mass) {
    if (!(total_mass > 0.0)) throw ConfigError("coefficients: total mass must be positive");
    if (c.r0) throw ConfigError("coefficients: exactly one of totalMass/r0 may be primary");
    c.total_mass = total_mass;
    return c;
}

inline CoefficientSet with_r0(CoefficientSet c, double r0) {
    if (!(r0 > 0.0)) throw ConfigError("coefficients: r0 must be positive");
    if (c.total_mass) throw ConfigError("coefficients: exactly one of totalMass/r0 may be primary");
    c.r0 = r0;
    return c;
}

} // namespace atlas
