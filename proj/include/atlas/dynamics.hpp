#pragma once

#include <functional>
#include <optional>

#include "atlas/curves.hpp"

namespace atlas {

struct SimState {
    double t = 0.0;
    Field S;
    Field I;
    double mass = 0.0; // trapezoid int(S + I)
    double dt = 0.0;
};

SimState make_state(const CoefficientSet& coeffs, Field S0, Field I0, double dt0);

// One accepted conservative IMEX step: the shared reaction flux
// F = beta S I - gamma I is treated explicitly, diffusion implicitly, so the
// quadrature mass of S + I is conserved exactly. A step producing a negative
// node is rejected and retried with dt halved.
SimState step(const SimState& state, const CoefficientSet& coeffs);

enum class Outcome { DFE, EE, Undecided };

struct SteadyReport {
    bool converged = false;
    SimState final_state;
    std::optional<int> matched_root;
    double matched_distance = 0.0;
    Outcome outcome = Outcome::Undecided;
    long steps = 0;
    double mass_drift_rel = 0.0;
};

SteadyReport run_to_steady(SimState state, const CoefficientSet& coeffs, double t_max,
                           double stagnation_tol, const EquilibriumSet* targets = nullptr,
                           const std::function<void(const SimState&)>& on_step = {});

} // namespace atlas
