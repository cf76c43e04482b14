#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "atlas/errors.hpp"

namespace atlas {

// Tridiagonal matrix in banded storage: sub/super have size n-1, diag size n.
struct Tridiagonal {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    std::size_t size() const { return diag.size(); }

    static Tridiagonal zeros(std::size_t n) {
        Tridiagonal t;
        t.sub.assign(n - 1, 0.0);
        t.diag.assign(n, 0.0);
        t.super.assign(n - 1, 0.0);
        return t;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        const std::size_t n = size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = diag[i] * x[i];
            if (i > 0) v += sub[i - 1] * x[i - 1];
            if (i + 1 < n) v += super[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }
};

// Thomas algorithm. No pivoting; every system assembled in this project is
// strictly diagonally dominant or an M-matrix shift of the Neumann Laplacian.
inline std::vector<double> thomas_solve(const Tridiagonal& t, const std::vector<double>& rhs) {
    const std::size_t n = t.size();
    std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);

    double pivot = t.diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot)) throw SolverFailure("tridiagonal solve: zero pivot at row 0");
    c[0] = (n > 1) ? t.super[0] / pivot : 0.0;
    d[0] = rhs[0] / pivot;

    for (std::size_t i = 1; i < n; ++i) {
        pivot = t.diag[i] - t.sub[i - 1] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw SolverFailure("tridiagonal solve: zero pivot at row " + std::to_string(i));
        if (i + 1 < n) c[i] = t.super[i] / pivot;
        d[i] = (rhs[i] - t.sub[i - 1] * d[i - 1]) / pivot;
    }

    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

} // namespace atlas
