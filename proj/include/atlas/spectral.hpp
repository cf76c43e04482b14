#pragma once

#include <utility>

#include "atlas/model.hpp"

namespace atlas {

// Principal pair of 0 = dI*lap(phi) - gamma*phi + (1/R1)*beta*phi with
// no-flux ends; phi positive and normalized to int phi^2 = 1.
struct EigenPair {
    double r1 = 0.0;
    double l_star = 0.0; // 1/R1
    Field phi1;
    int iterations = 0;  // surfaced because near-constant beta/gamma converges slowly
    double residual = 0.0;
};

// Closed-form Neumann Laplacian mode on (0, L):
// lambda_m = (m pi / L)^2, phi_0 = 1/sqrt(L), phi_m = sqrt(2/L) cos(m pi x / L).
struct LaplaceMode {
    int m = 0;
    double lambda = 0.0;
    Field phi;
};

EigenPair principal_pair(const CoefficientSet& coeffs);

// Overrides dI without touching the rest of the model.
EigenPair principal_pair(const CoefficientSet& coeffs, double dI);

// (max over nodes of beta/gamma, mean(beta)/mean(gamma)): the dI -> 0 and
// dI -> infinity limits of R1.
std::pair<double, double> r1_limits(const CoefficientSet& coeffs);

// Inverts the strictly decreasing map dI -> R1(dI) by bisection. Requires
// beta/gamma nonconstant and a target strictly inside the two limits.
double r1_inverse(const CoefficientSet& coeffs, double target, std::pair<double, double> bracket);

LaplaceMode laplace_mode(const Grid& g, int m);

// R0 = N / (l* |Omega|): whichever of r0/totalMass is primary resolves the other.
double resolved_r0(const CoefficientSet& coeffs, const EigenPair& eig);
double resolved_mass(const CoefficientSet& coeffs, const EigenPair& eig);

// Relative nodewise variation of beta/gamma; assumption (A) holds when > 1e-10.
double beta_gamma_variation(const CoefficientSet& coeffs);

} // namespace atlas
