#pragma once

#include <vector>

#include "mutbif/equilibria.hpp"

namespace mutbif {

enum class FreeParam { S_in, D };

enum class EventType { LP, H, LPC, PD, Hom, branch_end };

struct BranchPoint {
    double param = 0.0;
    State state;
    Eigen::Vector4d tangent = Eigen::Vector4d::Zero();  // (S, x1, x2, param), unit
    RouthHurwitz rh;
    double mu = 0.0, nu = 0.0;  // complex pair when nu > 0, else rightmost real
    double arclength = 0.0;
};

struct BifurcationEvent {
    EventType type = EventType::branch_end;
    double param = 0.0;
    State state;
    RouthHurwitz rh;
    double mu = 0.0, nu = 0.0;
    double l1 = 0.0;          // H only
    double period = 0.0;      // cycle events only
    double test_residual = 0.0;
    double fit_r2 = 0.0;      // Hom only
};

struct Branch {
    FreeParam free = FreeParam::S_in;
    std::vector<BranchPoint> points;   // ordered by arclength
    std::vector<BifurcationEvent> events;
    bool hit_range_end = false;        // false: corrector stalled at h_min
};

struct BranchPolicy {
    double h0 = 2e-3;
    double h_min = 1e-6;
    double h_max = 0.05;
    int max_steps = 20000;
};

/// Pseudo-arclength continuation of coexistence equilibria in one operating
/// parameter. Tangent predictor, Newton corrector orthogonal to the tangent,
/// adaptive step per BranchPolicy. Folds are traversed; LP (c3 = 0) and
/// H (c4 = 0 with c2, c3 > 0) events are localized by a secant iteration to
/// |test| < 1e-10 and stored with diagnostics (l1 at H points).
/// Both directions from the start point are explored and merged.
Branch continue_equilibria(const Equilibrium& start, const ModelParams& p, FreeParam free,
                           double lo, double hi, const BranchPolicy& pol = {});

/// d(mu)/d(param) across a located Hopf event by central differences of the
/// eigenvalue pair's real part; step h is relative to the event parameter.
double transversality(const BifurcationEvent& h_event, const ModelParams& p, FreeParam free,
                      double rel_step = 1e-5);

/// Equilibrium continuation system solved at a pinned parameter value,
/// seeded from `guess`. Used by transversality and the two-parameter curves.
std::optional<Equilibrium> solve_equilibrium_at(const ModelParams& p, const State& guess);

} // namespace mutbif
