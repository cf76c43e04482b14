#include "atlas/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace atlas {

namespace {

double field_mass(const CoefficientSet& coeffs, const Field& S, const Field& I) {
    double m = 0.0;
    for (std::size_t i = 0; i < S.values.size(); ++i)
        m += coeffs.grid->weights[i] * (S.values[i] + I.values[i]);
    return m;
}

} // namespace

SimState make_state(const CoefficientSet& coeffs, Field S0, Field I0, double dt0) {
    if (S0.grid != coeffs.grid || I0.grid != coeffs.grid)
        throw ConfigError("make_state: fields live on a different grid");
    if (!(dt0 > 0.0)) throw ConfigError("make_state: dt0 must be positive");
    for (double v : S0.values)
        if (v < 0.0) throw ConfigError("make_state: S0 has a negative node");
    for (double v : I0.values)
        if (v < 0.0) throw ConfigError("make_state: I0 has a negative node");
    SimState s;
    s.t = 0.0;
    s.S = std::move(S0);
    s.I = std::move(I0);
    s.mass = field_mass(coeffs, s.S, s.I);
    s.dt = dt0;
    return s;
}

SimState step(const SimState& state, const CoefficientSet& coeffs) {
    const Grid& g = *coeffs.grid;
    const std::size_t n = static_cast<std::size_t>(g.n);
    const SolverOptions& opts = coeffs.opts;

    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i)
        flux[i] = coeffs.beta.values[i] * state.S.values[i] * state.I.values[i] -
                  coeffs.gamma.values[i] * state.I.values[i];

    double dt = state.dt;
    for (int half = 0; half <= opts.sim_max_halvings; ++half) {
        Tridiagonal opS = laplacian_matrix(g, -dt * coeffs.dS);
        Tridiagonal opI = laplacian_matrix(g, -dt * coeffs.dI);
        for (std::size_t i = 0; i < n; ++i) {
            opS.diag[i] += 1.0;
            opI.diag[i] += 1.0;
        }
        std::vector<double> rhsS(n), rhsI(n);
        for (std::size_t i = 0; i < n; ++i) {
            rhsS[i] = state.S.values[i] - dt * flux[i];
            rhsI[i] = state.I.values[i] + dt * flux[i];
        }
        std::vector<double> Snew = thomas_solve(opS, rhsS);
        std::vector<double> Inew = thomas_solve(opI, rhsI);

        bool negative = false;
        for (std::size_t i = 0; i < n && !negative; ++i)
            negative = Snew[i] < 0.0 || Inew[i] < 0.0;
        if (!negative) {
            SimState out;
            out.t = state.t + dt;
            out.S.grid = &g;
            out.S.values = std::move(Snew);
            out.I.grid = &g;
            out.I.values = std::move(Inew);
            out.mass = field_mass(coeffs, out.S, out.I);
            out.dt = dt;
            return out;
        }
        dt *= 0.5;
    }
    throw SolverFailure("step: dt underflow at t = " + std::to_string(state.t) +
                        " after repeated positivity rejections");
}

SteadyReport run_to_steady(SimState state, const CoefficientSet& coeffs, double t_max,
                           double stagnation_tol, const EquilibriumSet* targets,
                           const std::function<void(const SimState&)>& on_step) {
    if (!(t_max > 0.0)) throw ConfigError("run_to_steady: tMax must be positive");
    const double mass0 = state.mass;
    if (coeffs.total_mass && std::abs(mass0 - *coeffs.total_mass) > 1e-8 * *coeffs.total_mass)
        throw ConfigError("run_to_steady: initial data mass differs from the configured N");

    const double extinction = 1e-10 * mass0 / coeffs.grid->length;
    SteadyReport rep;
    rep.mass_drift_rel = 0.0;

    // The explicit reaction is only stable for dt below ~2/|dF|; positivity
    // rejection alone cannot catch oscillations that stay positive.
    auto stability_cap = [&](const SimState& s) {
        double m = 0.0;
        for (std::size_t i = 0; i < s.S.values.size(); ++i)
            m = std::max(m, coeffs.beta.values[i] * (s.S.values[i] + s.I.values[i]) +
                                coeffs.gamma.values[i]);
        return 2.0 / m;
    };

    bool stagnated = false;
    while (state.t < t_max) {
        state.dt = std::min(state.dt, stability_cap(state));
        SimState next = step(state, coeffs);
        ++rep.steps;
        if (on_step) on_step(next);
        rep.mass_drift_rel = std::max(rep.mass_drift_rel, std::abs(next.mass - mass0) / mass0);

        double diff = 0.0;
        for (std::size_t i = 0; i < next.S.values.size(); ++i) {
            diff = std::max(diff, std::abs(next.S.values[i] - state.S.values[i]));
            diff = std::max(diff, std::abs(next.I.values[i] - state.I.values[i]));
        }
        const double rate = diff / next.dt;
        state = std::move(next);
        if (max_abs(state.I) < extinction) {
            stagnated = true; // disease extinct; S relaxes to the conserved constant
            break;
        }
        if (rate < stagnation_tol) {
            stagnated = true;
            break;
        }
        state.dt *= coeffs.opts.sim_growth;
        if (state.t + state.dt > t_max) state.dt = t_max - state.t + 1e-12 * t_max;
    }

    rep.converged = stagnated;
    if (max_abs(state.I) < extinction)
        rep.outcome = Outcome::DFE;
    else
        rep.outcome = stagnated ? Outcome::EE : Outcome::Undecided;

    if (targets && !targets->roots.empty()) {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < targets->roots.size(); ++k) {
            double d = 0.0;
            for (std::size_t i = 0; i < state.S.values.size(); ++i) {
                d = std::max(d, std::abs(state.S.values[i] - targets->roots[k].S.values[i]));
                d = std::max(d, std::abs(state.I.values[i] - targets->roots[k].I.values[i]));
            }
            if (d < best_dist) {
                best_dist = d;
                best = static_cast<int>(k);
            }
        }
        rep.matched_root = best;
        rep.matched_distance = best_dist;
    }
    rep.final_state = std::move(state);
    return rep;
}

} // namespace atlas
