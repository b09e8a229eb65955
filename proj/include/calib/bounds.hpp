#pragma once

// Concentration-bound bookkeeping for the calibration engines: the
// Hoeffding-Azuma and Freedman branches of Theta_n, the per-mode payoff
// moment bounds M_n, v_n, K_n, and the Omega constants of the regret
// theorems. Everything here is reporting; the algorithms never consult it.

#include <cmath>

#include "calib/br_complex.hpp"
#include "calib/game.hpp"
#include "calib/laguerre.hpp"

namespace calib {

// Theta_n = min{ v/sqrt(n) sqrt(2 ln(L^2/d)) + (2/3)(K/n) ln(L^2/d),
//                K/sqrt(n) sqrt(2 ln(L^2/d)) }
inline double theta_formula(double v, double K, double L, double delta, double n) {
    const double logterm = std::log(L * L / delta);
    const double freedman = v / std::sqrt(n) * std::sqrt(2.0 * logterm) + (2.0 / 3.0) * K / n * logterm;
    const double hoeffding = K / std::sqrt(n) * std::sqrt(2.0 * logterm);
    return std::min(freedman, hoeffding);
}

enum class BoundMode {
    CalibUnweighted,  // plain Voronoi calibration scores
    CalibWeighted,    // Laguerre scores, full monitoring
    PmOutcome,        // outcome-dependent signals
    PmAction          // action-dependent signals with estimated flags
};

struct ConcentrationBound {
    BoundMode mode = BoundMode::CalibUnweighted;
    long L = 0;
    double M_n = 0.0, v_n = 0.0, K_n = 0.0, Theta_n = 0.0;
    double Omega0 = 0.0, Omega1 = 0.0, Omega2 = 0.0, Omega3 = 0.0, Omega4 = 0.0, Omega5 = 0.0;
    double M_P = 0.0, M_W = 0.0, M_rho = 0.0, bc_norm = 0.0;
    double gamma_n = 0.0;  // n^{-1/3} schedule value at the horizon (action mode)
};

inline ConcentrationBound theoretical_bounds(const FiniteGame& g, const RefinedDiagram& rd,
                                             double delta, double n, BoundMode mode,
                                             int lipschitz_pairs = 10000) {
    ConcentrationBound b;
    b.mode = mode;
    b.L = rd.size();
    b.M_rho = g.max_abs_payoff();
    b.bc_norm = rd.bc_norm;
    b.M_P = rd.diagram ? distance_constant(*rd.diagram, rd.domain) : 0.0;
    b.M_W = estimate_lipschitz_W(g, lipschitz_pairs);
    const double L = double(b.L);
    const double bc = b.bc_norm;
    const double I = double(g.I);
    const double S = double(g.S);
    switch (mode) {
        case BoundMode::CalibUnweighted:
            b.M_n = 3.0 * std::sqrt(L);
            b.v_n = std::sqrt(3.0);
            b.K_n = 3.0;
            break;
        case BoundMode::CalibWeighted:
            b.M_n = 4.0 * std::sqrt(L) * bc;
            b.v_n = 2.0 * bc;
            b.K_n = 4.0 * bc;
            b.Omega0 = 16.0 * b.M_rho * b.M_P * std::pow(L, 1.5) * bc;
            b.Omega1 = 8.0 * b.M_rho * b.M_P * std::sqrt(L) * bc;
            break;
        case BoundMode::PmOutcome:
            b.M_n = 4.0 * std::sqrt(L) * bc;
            b.v_n = 2.0 * bc;
            b.K_n = 4.0 * bc;
            b.Omega0 = 16.0 * b.M_P * b.M_W * std::sqrt(L);
            b.Omega1 = 2.0 * b.M_W + 8.0 * b.M_W * b.M_P + b.M_rho;
            b.Omega2 = L * (L + 2.0 * S + 2.0);
            break;
        case BoundMode::PmAction: {
            b.gamma_n = std::pow(n, -1.0 / 3.0);
            b.M_n = 4.0 * std::sqrt(L * I / b.gamma_n);
            b.v_n = 4.0 * std::sqrt(I / b.gamma_n);
            b.K_n = 4.0 / b.gamma_n;
            b.Omega1 = 16.0 * b.M_P * b.M_W * std::sqrt(L * I) + 3.0 * b.M_W * b.M_rho * I;
            b.Omega2 = 2.0 * b.M_W * std::sqrt(I) * (8.0 * b.M_P + std::sqrt(S));
            b.Omega3 = b.M_rho;
            b.Omega4 = 2.0 * b.M_W * (4.0 * b.M_P + std::sqrt(I * S));
            b.Omega5 = L * (L + 2.0 + 2.0 * I * S);
            break;
        }
    }
    b.Theta_n = theta_formula(b.v_n, b.K_n, L, delta, n);
    return b;
}

}  // namespace calib
