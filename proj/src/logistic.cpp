#include "atlas/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace atlas {

namespace {

constexpr double kInteriorMargin = 1e-14;

void clip_interior(std::vector<double>& u, double dI) {
    const double hi = 1.0 / dI - kInteriorMargin;
    for (double& v : u) v = std::clamp(v, kInteriorMargin, hi);
}

std::vector<double> residual_vec(const CoefficientSet& coeffs, double l, const std::vector<double>& u) {
    const Grid& g = *coeffs.grid;
    const std::size_t n = static_cast<std::size_t>(g.n);
    const double inv_h2 = 1.0 / (g.h * g.h);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lap;
        if (i == 0)
            lap = 2.0 * (u[1] - u[0]) * inv_h2;
        else if (i + 1 == n)
            lap = 2.0 * (u[n - 2] - u[n - 1]) * inv_h2;
        else
            lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
        f[i] = coeffs.dI * lap +
               (l * coeffs.beta.values[i] * (1.0 - coeffs.dI * u[i]) - coeffs.gamma.values[i]) * u[i];
    }
    return f;
}

double max_abs_vec(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Residual evaluations cancel dI*lap(u) ~ u/h^2 terms, so the attainable
// floor scales with eps_mach * (dI/h^2 + reaction scale) * |u|.
double roundoff_floor(const CoefficientSet& coeffs, double l, double u_max) {
    const double h2 = coeffs.grid->h * coeffs.grid->h;
    double beta_max = max_value(coeffs.beta);
    double gamma_max = max_value(coeffs.gamma);
    const double eps = std::numeric_limits<double>::epsilon();
    return 16.0 * eps * (coeffs.dI / h2 + l * beta_max + gamma_max) * std::max(u_max, 1e-300);
}

} // namespace

double logistic_residual(const CoefficientSet& coeffs, double l, const Field& u) {
    return max_abs_vec(residual_vec(coeffs, l, u.values));
}

namespace {

std::vector<double> newton_logistic(const CoefficientSet& coeffs, double l, std::vector<double> u) {
    const Grid& g = *coeffs.grid;
    const std::size_t n = static_cast<std::size_t>(g.n);
    const SolverOptions& opts = coeffs.opts;
    clip_interior(u, coeffs.dI);

    const double tol = opts.newton_tol_factor * std::max(1.0, l);
    std::vector<double> f = residual_vec(coeffs, l, u);
    double fnorm = max_abs_vec(f);
    int stagnant = 0;
    int polish_left = 3;

    for (int it = 0; it < opts.newton_max_iterations; ++it) {
        // Past the nominal tolerance, keep polishing while quadratic progress
        // lasts: near l* the Jacobian is almost singular and the leftover
        // null-direction error would otherwise contaminate v = du/dl.
        if (fnorm <= tol) {
            if (polish_left == 0) break;
            --polish_left;
        }
        const double floor = roundoff_floor(coeffs, l, max_abs_vec(u));
        if (fnorm <= floor && stagnant >= 2) break;

        Tridiagonal jac = laplacian_matrix(g, coeffs.dI);
        for (std::size_t i = 0; i < n; ++i)
            jac.diag[i] += l * coeffs.beta.values[i] * (1.0 - 2.0 * coeffs.dI * u[i]) - coeffs.gamma.values[i];

        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -f[i];
        std::vector<double> delta = thomas_solve(jac, rhs);

        double s = 1.0;
        bool accepted = false;
        for (int half = 0; half <= opts.newton_max_halvings; ++half) {
            std::vector<double> trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + s * delta[i];
            clip_interior(trial, coeffs.dI);
            std::vector<double> ft = residual_vec(coeffs, l, trial);
            double ftn = max_abs_vec(ft);
            if (ftn < fnorm) {
                stagnant = (ftn > 0.5 * fnorm) ? stagnant + 1 : 0;
                u.swap(trial);
                f.swap(ft);
                fnorm = ftn;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            if (fnorm <= tol || fnorm <= roundoff_floor(coeffs, l, max_abs_vec(u))) break;
            throw SolverFailure("solve_u: line search stalled at l = " + std::to_string(l) +
                                " with residual " + std::to_string(fnorm));
        }
    }
    if (fnorm > tol && fnorm > roundoff_floor(coeffs, l, max_abs_vec(u)))
        throw SolverFailure("solve_u: Newton did not converge at l = " + std::to_string(l));
    return u;
}

std::vector<double> default_guess(const CoefficientSet& coeffs, const EigenPair& eig, double c_star,
                                  double l) {
    const std::size_t n = static_cast<std::size_t>(coeffs.grid->n);
    std::vector<double> u(n);
    if ((l - eig.l_star) / eig.l_star < 0.5) {
        // Leading-order profile (l - l*) c* phi1 near the threshold.
        for (std::size_t i = 0; i < n; ++i) u[i] = (l - eig.l_star) * c_star * eig.phi1.values[i];
    } else {
        // Nodewise logistic balance, exact for constant coefficients.
        for (std::size_t i = 0; i < n; ++i)
            u[i] = (1.0 - coeffs.gamma.values[i] / (l * coeffs.beta.values[i])) / coeffs.dI;
    }
    return u;
}

} // namespace

Field solve_u(const CoefficientSet& coeffs, const EigenPair& eig, double l, const Field* warm_start) {
    const Grid& g = *coeffs.grid;
    const double l_star = eig.l_star;
    if (!(l > l_star))
        throw ConfigError("solve_u: no positive solution exists for l <= l* (l = " + std::to_string(l) + ")");

    const double c_star = threshold_expansion(coeffs, eig).c_star;
    // Newton can slide onto the trivial zero branch from a poor start; the
    // genuine solution always clears a fraction of the near-threshold scale.
    const double trivial_bar =
        0.1 * std::min((l - l_star) * c_star * max_abs(eig.phi1), 0.5 / coeffs.dI);

    std::vector<double> u;
    bool solved = false;
    if (warm_start && warm_start->grid == &g) {
        try {
            u = newton_logistic(coeffs, l, warm_start->values);
            solved = max_abs_vec(u) >= trivial_bar;
        } catch (const SolverFailure&) {
            solved = false;
        }
    }
    if (!solved) {
        u = newton_logistic(coeffs, l, default_guess(coeffs, eig, c_star, l));
        if (max_abs_vec(u) < trivial_bar) {
            // Walk l up geometrically from the threshold, warm-starting.
            double lw = std::min(l, l_star * 1.5);
            u = newton_logistic(coeffs, lw, default_guess(coeffs, eig, c_star, lw));
            while (lw < l) {
                lw = std::min(l, lw * 1.5);
                u = newton_logistic(coeffs, lw, u);
            }
            if (max_abs_vec(u) < trivial_bar)
                throw SolverFailure("solve_u: converged to the trivial branch at l = " + std::to_string(l));
        }
    }

    const double hi = 1.0 / coeffs.dI;
    for (double v : u)
        if (!(v > 0.0 && v < hi)) throw SolverFailure("solve_u: solution violates 0 < u < 1/dI");

    Field out;
    out.grid = &g;
    out.values = std::move(u);
    return out;
}

Field solve_v(const CoefficientSet& coeffs, double l, const Field& u) {
    const Grid& g = *coeffs.grid;
    const std::size_t n = static_cast<std::size_t>(g.n);

    Tridiagonal jac = laplacian_matrix(g, coeffs.dI);
    for (std::size_t i = 0; i < n; ++i)
        jac.diag[i] += l * coeffs.beta.values[i] * (1.0 - 2.0 * coeffs.dI * u.values[i]) - coeffs.gamma.values[i];

    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = -coeffs.beta.values[i] * (1.0 - coeffs.dI * u.values[i]) * u.values[i];

    Field v;
    v.grid = &g;
    v.values = thomas_solve(jac, rhs);
    for (double w : v.values)
        if (!(w > 0.0))
            throw SolverFailure("solve_v: derivative lost positivity at l = " + std::to_string(l));
    return v;
}

ThresholdExpansion threshold_expansion(const CoefficientSet& coeffs, const EigenPair& eig) {
    const Grid& g = *coeffs.grid;
    const std::size_t n = static_cast<std::size_t>(g.n);
    double int_bp2 = 0.0, int_bp3 = 0.0, int_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = g.weights[i], p = eig.phi1.values[i], b = coeffs.beta.values[i];
        int_p += w * p;
        int_bp2 += w * b * p * p;
        int_bp3 += w * b * p * p * p;
    }
    ThresholdExpansion out;
    out.c_star = eig.r1 * int_bp2 / (coeffs.dI * int_bp3);
    const double mean_p = int_p / g.length;
    const double mean_bp2 = int_bp2 / g.length;
    const double mean_bp3 = int_bp3 / g.length;
    out.slope_at_l_star = (1.0 - mean_p * mean_bp2 / mean_bp3) / eig.l_star;
    return out;
}

LogisticPoint logistic_point(const CoefficientSet& coeffs, const EigenPair& eig, double l, const Field* warm_start) {
    LogisticPoint p;
    p.l = l;
    p.u = solve_u(coeffs, eig, l, warm_start);
    p.v = solve_v(coeffs, l, p.u);
    p.int_u = integrate(p.u);
    p.int_lv = l * integrate(p.v);
    p.z = Field(*coeffs.grid);
    for (int i = 0; i < coeffs.grid->n; ++i)
        p.z.values[static_cast<std::size_t>(i)] =
            l * (1.0 - coeffs.dI * p.u.values[static_cast<std::size_t>(i)]);
    return p;
}

std::vector<LogisticPoint> continuation_sweep(const CoefficientSet& coeffs, const EigenPair& eig,
                                              std::span<const double> l_values) {
    std::vector<LogisticPoint> out;
    out.reserve(l_values.size());
    const Field* warm = nullptr;
    for (double l : l_values) {
        out.push_back(logistic_point(coeffs, eig, l, warm));
        warm = &out.back().u;
        if (out.size() >= 2) {
            const Field& prev = out[out.size() - 2].u;
            const Field& cur = out.back().u;
            for (std::size_t i = 0; i < prev.values.size(); ++i)
                if (!(cur.values[i] > prev.values[i]))
                    throw SolverFailure("continuation_sweep: monotonicity u^{l+} > u^{l} failed at l = " +
                                        std::to_string(out.back().l));
        }
    }
    return out;
}

} // namespace atlas
