#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atlas/curves.hpp"

namespace atlas {

enum class Branch { Low, High };

// A dS -> 0 limit profile. For branches that solve the nonlocal limit
// equation, u_star is the solution and s_star = N(1 - dI u*) / int(1 - dI u*).
// For the high branch above the tail regime, s_star = gamma/beta and i_star
// is the constant R0/R1 - avg(gamma/beta).
struct LimitProfile {
    Branch branch = Branch::Low;
    double l_target = 0.0; // the root l of N_dI(l) = r0 behind u*, 0 when not applicable
    Field u_star;
    Field s_star;
    std::optional<Field> i_star;
    double cross_check_error = 0.0; // nonlocal fixed-point route vs l-parametrization
};

LimitProfile solve_nonlocal(const CoefficientSet& coeffs, const EigenPair& eig, double r0, Branch branch);

LimitProfile predict_high_profile(const CoefficientSet& coeffs, const EigenPair& eig, double r0);

struct ScalingReport {
    std::string regime; // "i-1", "i-2" or "ii"
    std::vector<double> dS_values;
    std::vector<double> l_low, l_high;
    std::vector<double> ratio_sup; // ||I_low||_inf / dS
    std::vector<double> ratio_inf; // min I_low / dS
    std::vector<double> s_low_error;
    std::vector<double> s_high_error; // vs gamma/beta or vs S*_high, by regime
    double band_max = 0.0, band_min = 0.0;
    bool band_ok = false;       // band_max/band_min <= 50
    bool s_low_decreasing = false;
    bool s_high_decreasing = false;
    bool pass = false;
};

ScalingReport verify_scaling(const CoefficientSet& coeffs, const EigenPair& eig, double r0,
                             std::span<const double> dS_values);

} // namespace atlas
