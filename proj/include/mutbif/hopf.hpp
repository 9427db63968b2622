#pragma once

#include <complex>
#include <optional>

#include "mutbif/equilibria.hpp"

namespace mutbif {

/// First Lyapunov coefficient of a Hopf point (Kuznetsov normal-form
/// projection). The state must be an equilibrium with c4 = 0, c2 > 0.
/// Second/third directional derivatives come from central differences of
/// the analytic Jacobian at a scaled step of 1e-4. Only the sign is
/// normalization-independent; magnitudes follow this projection, not
/// any particular tool's scaling.
/// Throws std::runtime_error when the imaginary pair degenerates (near BT).
double lyapunov_l1(const State& hopf_state, const ModelParams& p);

/// Variant with an explicit right-eigenvector seed; l1's sign must not
/// depend on it (exercised by the property tests).
double lyapunov_l1(const State& hopf_state, const ModelParams& p,
                   const Eigen::Vector3cd& q_seed);

struct HopfPoint {
    State state;
    double S_in;    // parameter value of the Hopf locus point
    double omega;   // sqrt(c2)
    double l1;
};

/// Solves the Hopf system {equilibrium, c4 = 0} for (S, x1, x2, S_in) at
/// fixed D, seeded from a nearby guess. Empty on Newton failure or when the
/// located point violates c2 > 0, c3 > 0.
std::optional<HopfPoint> solve_hopf_at_D(const ModelParams& p, double sin_guess,
                                         const State& state_guess);

/// Right eigenvector of a 3x3 matrix for a prescribed eigenvalue, via the
/// largest cross product of two rows of (A - lambda I).
Eigen::Vector3cd eigenvector3(const Eigen::Matrix3cd& A, std::complex<double> lambda);

} // namespace mutbif
