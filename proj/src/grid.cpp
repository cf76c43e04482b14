#include "atlas/grid.hpp"

#include <algorithm>
#include <cmath>

#include "atlas/errors.hpp"

namespace atlas {

Grid build_grid(double length, int n) {
    if (!(length > 0.0)) throw ConfigError("grid: domain length must be positive");
    if (n < 3) throw ConfigError("grid: need at least 3 nodes");
    Grid g;
    g.length = length;
    g.n = n;
    g.h = length / static_cast<double>(n - 1);
    g.x.resize(static_cast<std::size_t>(n));
    g.weights.assign(static_cast<std::size_t>(n), g.h);
    for (int i = 0; i < n; ++i) g.x[static_cast<std::size_t>(i)] = g.h * static_cast<double>(i);
    g.x.back() = length;
    g.weights.front() = 0.5 * g.h;
    g.weights.back() = 0.5 * g.h;
    return g;
}

double integrate(const Field& f) {
    const Grid& g = *f.grid;
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) s += g.weights[static_cast<std::size_t>(i)] * f.values[static_cast<std::size_t>(i)];
    return s;
}

double average(const Field& f) { return integrate(f) / f.grid->length; }

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double min_value(const Field& f) { return *std::min_element(f.values.begin(), f.values.end()); }

double max_value(const Field& f) { return *std::max_element(f.values.begin(), f.values.end()); }

Field NeumannLaplacian::apply(const Field& f) const {
    const Grid& g = *grid;
    const double inv_h2 = 1.0 / (g.h * g.h);
    const std::size_t n = static_cast<std::size_t>(g.n);
    Field out(g);
    out.values[0] = 2.0 * (f.values[1] - f.values[0]) * inv_h2;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out.values[i] = (f.values[i - 1] - 2.0 * f.values[i] + f.values[i + 1]) * inv_h2;
    out.values[n - 1] = 2.0 * (f.values[n - 2] - f.values[n - 1]) * inv_h2;
    return out;
}

Field apply_laplacian(const NeumannLaplacian& a, const Field& f) { return a.apply(f); }

Tridiagonal laplacian_matrix(const Grid& g, double scale) {
    const std::size_t n = static_cast<std::size_t>(g.n);
    const double c = scale / (g.h * g.h);
    Tridiagonal t = Tridiagonal::zeros(n);
    t.diag[0] = -2.0 * c;
    t.super[0] = 2.0 * c;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        t.sub[i - 1] = c;
        t.diag[i] = -2.0 * c;
        t.super[i] = c;
    }
    t.sub[n - 2] = 2.0 * c;
    t.diag[n - 1] = -2.0 * c;
    return t;
}

} // namespace atlas
