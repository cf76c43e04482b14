#pragma once

#include <functional>
#include <vector>

#include "atlas/tridiag.hpp"

namespace atlas {

// Uniform 1-D grid on (0, L), both endpoints included, with trapezoid
// quadrature weights (h/2 at the ends, h inside). The trapezoid rule is the
// exact left-annihilator of the ghost-point Neumann Laplacian below, which
// is what makes discrete mass conservation exact.
struct Grid {
    double length = 0.0;
    int n = 0;
    double h = 0.0;
    std::vector<double> x;
    std::vector<double> weights;
};

Grid build_grid(double length, int n);

struct Field {
    const Grid* grid = nullptr;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0) : grid(&g), values(static_cast<std::size_t>(g.n), fill) {}

    static Field sample(const Grid& g, const std::function<double(double)>& f) {
        Field out(g);
        for (int i = 0; i < g.n; ++i) out.values[static_cast<std::size_t>(i)] = f(g.x[static_cast<std::size_t>(i)]);
        return out;
    }

    int size() const { return grid ? grid->n : 0; }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

double integrate(const Field& f);
double average(const Field& f);
double max_abs(const Field& f);
double min_value(const Field& f);
double max_value(const Field& f);

// Central-difference Laplacian with ghost-point reflection at both ends:
// row 0 applies 2(u1-u0)/h^2 and row n-1 applies 2(u_{n-2}-u_{n-1})/h^2,
// so w^T A = 0 exactly for the trapezoid weight vector w.
struct NeumannLaplacian {
    const Grid* grid = nullptr;

    NeumannLaplacian() = default;
    explicit NeumannLaplacian(const Grid& g) : grid(&g) {}

    Field apply(const Field& f) const;
};

Field apply_laplacian(const NeumannLaplacian& a, const Field& f);

// Banded form of scale * A, ready for diagonal shifts before a Thomas solve.
Tridiagonal laplacian_matrix(const Grid& g, double scale);

} // namespace atlas
