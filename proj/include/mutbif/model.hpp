#pragma once

#include <Eigen/Dense>

#include "mutbif/params.hpp"

namespace mutbif {

/// Density-dependent growth rate of species i:
///   f_i(S, x_j) = m_i S/(K_i+S) * x_j/(L_i+x_j),  j = 3-i.
/// Vanishes at S=0 and at x_j=0 (obligate mutualism).
double growth(int i, double S, double x_partner, const ModelParams& p);

struct GrowthPartials {
    double dS;  // ∂f_i/∂S
    double dx;  // ∂f_i/∂x_partner
};

GrowthPartials growth_partials(int i, double S, double x_partner, const ModelParams& p);

/// Right-hand side of the chemostat system:
///   S'  = D (S_in - S) - f_1 x_1 - f_2 x_2
///   x1' = (f_1 - D_1) x_1
///   x2' = (f_2 - D_2) x_2
State rhs(const State& y, const ModelParams& p);

/// Analytic Jacobian of rhs. Diagonal at the washout state.
Eigen::Matrix3d jacobian(const State& y, const ModelParams& p);

/// Dissipativity bound: trajectories end up in
///   { S + x1 + x2 <= D S_in / min(D, D1, D2) }.
double omega_bound(const ModelParams& p);

inline Eigen::Vector3d to_vector(const State& y) { return {y.S, y.x1, y.x2}; }
inline State to_state(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

} // namespace mutbif
