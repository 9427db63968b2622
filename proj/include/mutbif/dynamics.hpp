#pragma once

#include <vector>

#include "mutbif/equilibria.hpp"
#include "mutbif/rk45.hpp"

namespace mutbif {

struct Trajectory {
    std::vector<double> t;
    std::vector<State> y;
    OdeStats stats;
};

/// Adaptive RK5(4) trajectory with absolute tolerance tol*1e-2. States are
/// projected back to the nonnegative orthant when undershoots stay within
/// -1e-12 of zero. sample_dt > 0 emits equidistant dense samples instead of
/// the raw accepted steps.
Trajectory integrate(const State& init, const ModelParams& p, double t_end, double tol,
                     double sample_dt = 0.0);

struct AttractorLabel {
    enum class Kind { equilibrium, cycle, unresolved };
    Kind kind = Kind::unresolved;
    int equilibrium_index = -1;  // 0 = washout, then coexistence sorted by S*
    double period = 0.0;
    State reference{};           // point on the cycle (section crossing)
    double transient_time = 0.0;
};

/// Integrates until the trajectory settles on a known equilibrium
/// (velocity < 1e-9, distance < 1e-5) or successive Poincare returns match
/// in state to 1e-5 with consistent return time. The section is the plane
/// through the trailing-window mean with the local velocity as normal.
/// Slow near-homoclinic passages run out the budget and come back
/// unresolved.
AttractorLabel classify_attractor(const State& init, const ModelParams& p, double budget,
                                  const std::vector<Equilibrium>& known, double tol = 1e-8);

/// Convenience overload computing the equilibrium inventory itself.
AttractorLabel classify_attractor(const State& init, const ModelParams& p, double budget = 5000.0);

struct BasinSpec {
    double x1_lo = 0.0, x1_hi = 0.0;  // zero: derived from the omega bound
    double x2_lo = 0.0, x2_hi = 0.0;
    int n1 = 21, n2 = 21;
    double S0 = -1.0;                 // negative: S_in/2
};

struct BasinMap {
    BasinSpec spec;
    std::vector<Equilibrium> equilibria;     // washout + coexistence
    std::vector<AttractorLabel> labels;      // row-major, x1 fastest
    State cell_center(int i1, int i2) const;
};

/// Per-cell attractor labels over an initial-condition grid at fixed S.
/// Cells are independent and run concurrently; output order is fixed.
BasinMap basin_map(const BasinSpec& spec, const ModelParams& p, double budget = 5000.0,
                   double tol = 1e-8);

/// True when two labels name the same attractor (same equilibrium, or cycle
/// periods within 5%).
bool same_attractor(const AttractorLabel& a, const AttractorLabel& b);

} // namespace mutbif
