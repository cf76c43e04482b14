#pragma once

// Independent reference computations used only by the test suite. These
// deliberately re-derive the discrete operators from first principles and
// solve them with different algorithms than the library:
//   - principal eigenvalue via a full symmetric-tridiagonal eigendecomposition
//     (Eigen) instead of inverse power iteration;
//   - the logistic profile via damped Picard pseudo-transient iteration with
//     its own elimination loop instead of Newton.

#include <vector>

#include "atlas/model.hpp"

namespace oracles {

struct DensePair {
    double r1 = 0.0;
    std::vector<double> phi; // positive, int phi^2 = 1
};

DensePair dense_principal_pair(const atlas::CoefficientSet& coeffs);

// Damped Picard: implicit diffusion, frozen reaction, relaxation tau, iterated
// to stagnation below 1e-13 relative.
std::vector<double> picard_u(const atlas::CoefficientSet& coeffs, double l, double tau = 0.2,
                             int max_iters = 2000000);

} // namespace oracles
