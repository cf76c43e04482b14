#include "atlas/spectral.hpp"

#include <cmath>
#include <string>

#include "atlas/tridiag.hpp"

namespace atlas {

namespace {

double weighted_dot(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += g.weights[i] * a[i] * b[i];
    return s;
}

} // namespace

EigenPair principal_pair(const CoefficientSet& coeffs, double dI) {
    const Grid& g = *coeffs.grid;
    const std::size_t n = static_cast<std::size_t>(g.n);
    const SolverOptions& opts = coeffs.opts;

    // L = -dI*A + diag(gamma); the sought mu = 1/R1 is the smallest eigenvalue
    // of L phi = mu beta phi in the quadrature-weighted inner product.
    Tridiagonal lhs = laplacian_matrix(g, -dI);
    for (std::size_t i = 0; i < n; ++i) lhs.diag[i] += coeffs.gamma.values[i];

    std::vector<double> x(n, 1.0), rhs(n), lx(n);
    double mu = 0.0, mu_prev = 0.0;
    int iter = 0;
    bool converged = false;
    for (; iter < opts.eigen_max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) rhs[i] = coeffs.beta.values[i] * x[i];
        std::vector<double> y = thomas_solve(lhs, rhs);

        double norm = std::sqrt(weighted_dot(g, y, y));
        if (!(norm > 0.0) || !std::isfinite(norm)) throw SolverFailure("principal_pair: iterate collapsed");
        for (double& v : y) v /= norm;

        lx = lhs.apply(y);
        double num = weighted_dot(g, y, lx);
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) den += g.weights[i] * coeffs.beta.values[i] * y[i] * y[i];
        mu = num / den;

        x.swap(y);
        if (iter > 0 && std::abs(mu - mu_prev) <= opts.eigen_stagnation * std::abs(mu)) {
            converged = true;
            break;
        }
        mu_prev = mu;
    }
    if (!converged)
        throw SolverFailure("principal_pair: no convergence after " + std::to_string(iter) + " iterations");

    // Principal eigenfunction has one sign; orient positive and reject any
    // interior sign change as a solver failure.
    double orient = 0.0;
    for (std::size_t i = 0; i < n; ++i) orient += g.weights[i] * x[i];
    if (orient < 0.0)
        for (double& v : x) v = -v;
    for (double v : x)
        if (!(v > 0.0)) throw SolverFailure("principal_pair: sign change in computed eigenfunction");

    EigenPair out;
    out.phi1.grid = &g;
    out.phi1.values = std::move(x);
    double norm = std::sqrt(weighted_dot(g, out.phi1.values, out.phi1.values));
    for (double& v : out.phi1.values) v /= norm;

    out.r1 = 1.0 / mu;
    out.l_star = mu;
    out.iterations = iter + 1;

    lx = lhs.apply(out.phi1.values);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        res = std::max(res, std::abs(-lx[i] + mu * coeffs.beta.values[i] * out.phi1.values[i]));
    out.residual = res;
    return out;
}

EigenPair principal_pair(const CoefficientSet& coeffs) { return principal_pair(coeffs, coeffs.dI); }

std::pair<double, double> r1_limits(const CoefficientSet& coeffs) {
    const std::size_t n = static_cast<std::size_t>(coeffs.grid->n);
    double ratio_max = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        ratio_max = std::max(ratio_max, coeffs.beta.values[i] / coeffs.gamma.values[i]);
    return {ratio_max, average(coeffs.beta) / average(coeffs.gamma)};
}

double beta_gamma_variation(const CoefficientSet& coeffs) {
    const std::size_t n = static_cast<std::size_t>(coeffs.grid->n);
    double lo = coeffs.beta.values[0] / coeffs.gamma.values[0], hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
        double r = coeffs.beta.values[i] / coeffs.gamma.values[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return (hi - lo) / hi;
}

double r1_inverse(const CoefficientSet& coeffs, double target, std::pair<double, double> bracket) {
    if (beta_gamma_variation(coeffs) <= 1e-10)
        throw ConfigError("r1_inverse: beta/gamma is constant, R1 does not depend on dI");
    auto [lim0, lim_inf] = r1_limits(coeffs);
    if (!(target > lim_inf && target < lim0))
        throw ConfigError("r1_inverse: target outside the open interval (mean beta/mean gamma, max beta/gamma)");

    double lo = bracket.first, hi = bracket.second;
    if (!(lo > 0.0 && hi > lo)) throw ConfigError("r1_inverse: invalid bracket");
    double r_lo = principal_pair(coeffs, lo).r1;
    double r_hi = principal_pair(coeffs, hi).r1;
    // R1 is strictly decreasing in dI.
    if (!(r_lo > target && r_hi < target)) throw ConfigError("r1_inverse: bracket does not straddle the target");

    double mid = lo, r_mid = r_lo;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        r_mid = principal_pair(coeffs, mid).r1;
        if (std::abs(r_mid - target) <= coeffs.opts.r1_inverse_tol) return mid;
        if (r_mid > target)
            lo = mid;
        else
            hi = mid;
    }
    throw SolverFailure("r1_inverse: bisection did not reach tolerance");
}

LaplaceMode laplace_mode(const Grid& g, int m) {
    if (m < 0) throw ConfigError("laplace_mode: m must be nonnegative");
    LaplaceMode mode;
    mode.m = m;
    const double pi = 3.14159265358979323846;
    if (m == 0) {
        mode.lambda = 0.0;
        mode.phi = Field(g, 1.0 / std::sqrt(g.length));
        return mode;
    }
    const double k = static_cast<double>(m) * pi / g.length;
    mode.lambda = k * k;
    const double amp = std::sqrt(2.0 / g.length);
    mode.phi = Field::sample(g, [&](double x) { return amp * std::cos(k * x); });
    return mode;
}

double resolved_r0(const CoefficientSet& coeffs, const EigenPair& eig) {
    if (coeffs.r0) return *coeffs.r0;
    if (coeffs.total_mass) return *coeffs.total_mass / (eig.l_star * coeffs.grid->length);
    throw ConfigError("model: neither r0 nor totalMass was provided");
}

double resolved_mass(const CoefficientSet& coeffs, const EigenPair& eig) {
    if (coeffs.total_mass) return *coeffs.total_mass;
    if (coeffs.r0) return *coeffs.r0 * eig.l_star * coeffs.grid->length;
    throw ConfigError("model: neither r0 nor totalMass was provided");
}

} // namespace atlas
