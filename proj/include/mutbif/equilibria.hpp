#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "mutbif/model.hpp"

namespace mutbif {

/// Interval [x_lo, x_hi] on which the curve function F_i is defined, i.e. the
/// two roots of phi_i(x_j) = D_i, together with the simplex bound D S_in/D_j.
struct CurveDomain {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double simplex_bound = 0.0;
};

/// Characteristic-cubic coefficients at a coexistence equilibrium,
/// P(l) = l^3 + c1 l^2 + c2 l + c3, with c4 = c1 c2 - c3.
struct RouthHurwitz {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

enum class EquilibriumKind { washout, coexistence };
enum class Stability { les, unstable };

struct Equilibrium {
    State state;
    EquilibriumKind kind = EquilibriumKind::coexistence;
    RouthHurwitz rh;                                 // coexistence only
    std::array<std::complex<double>, 3> eigenvalues{};
    Stability stability = Stability::unstable;
    bool critical = false;  // double root merged at a near-tangency
};

/// phi_i(x_j) = f_i(S_in - (D_j/D) x_j, x_j) on [0, D S_in/D_j].
double phi(int i, double x_j, const ModelParams& p);

/// Locates the unique interior maximum of phi_i from the closed-form
/// quadratic of its derivative numerator, then bisects phi_i = D_i on both
/// sides. Empty when max phi_i < D_i.
std::optional<CurveDomain> phi_roots(int i, const ModelParams& p);

/// Reduced discriminant of the phi_i' numerator (positive for all valid
/// parameters).
double phi_quadratic_discriminant(int i, const ModelParams& p);

/// Closed-form curve function x_i = F_i(x_j) solving
/// f_i(S_in - D_1 x_1/D - D_2 x_2/D, x_j) = D_i. Throws on the rational
/// form's denominator singularity, which lies outside the curve domain.
double F_curve(int i, double x_j, const ModelParams& p);

/// dF_i/dx_j, closed rational form.
double F_curve_deriv(int i, double x_j, const ModelParams& p);

/// dF_i/dx_j through the growth partials:
///   F_1' = (-D_2 E + D G)/(D_1 E),  F_2' = (-D_1 F + D H)/(D_2 F).
/// Agrees with F_curve_deriv; kept as the second algebraic route.
double F_curve_deriv_partials(int i, double x_j, const ModelParams& p);

/// Slope product F_1'(x2) F_2'(x1) evaluated at an arbitrary state from the
/// growth partials; equals 1 exactly on the saddle-node locus.
double slope_product(const State& y, const ModelParams& p);

RouthHurwitz routh_hurwitz(const State& y, const ModelParams& p);

/// All coexistence equilibria, sorted by S*. Scans the remaining equilibrium
/// condition along the curve gamma_1, brackets sign changes on a 2048-point
/// grid (refined x8 near each change), then polishes with Newton on the
/// reduced 2x2 system. Near-tangent double roots come back as a single
/// equilibrium flagged critical.
std::vector<Equilibrium> find_coexistence(const ModelParams& p);

/// Fills Routh-Hurwitz data, eigenvalues and the stability tag.
/// Washout: eigenvalues (-D, -D1, -D2) in closed form, always LES.
Equilibrium classify(Equilibrium eq, const ModelParams& p);

Equilibrium washout_equilibrium(const ModelParams& p);

/// Sign chart of the reduced planar system (no-mortality case):
///   I: x1'<0, x2'>0   II: x1'<0, x2'<0   III: x1'>0, x2'<0
///   IV: both positive (only when coexistence equilibria exist).
enum class RegionTag { I, II, III, IV, on_curve };

RegionTag reduced_region(double x1, double x2, const ModelParams& p);

/// Brute-force oracle: Newton on the reduced system from every cell of an
/// n x n grid over the open simplex, deduplicated. Test support.
std::vector<State> coexistence_grid_oracle(const ModelParams& p, int n);

} // namespace mutbif
