#pragma once

#include <string>

#include "mutbif/cycles.hpp"
#include "mutbif/dynamics.hpp"

namespace mutbif {

struct Window {
    double sin_min = 0.0, sin_max = 5.0;
    double d_min = 0.0, d_max = 0.8;
    bool contains(double s, double d) const {
        return s >= sin_min && s <= sin_max && d >= d_min && d <= d_max;
    }
};

struct BifCurvePoint {
    double S_in = 0.0, D = 0.0;
    State state{};
    double aux = 0.0;  // omega^2 = c2 on the Hopf curve, period T on cycle curves
    double l1 = 0.0;   // Hopf curve only
};

struct BifCurve {
    EventType type = EventType::LP;
    std::vector<BifCurvePoint> points;  // arclength-ordered (continued curves)
};

struct Codim2Point {
    enum class Type { BT, GH, R1, R2, CPC };
    Type type;
    double S_in = 0.0, D = 0.0;
    double uncertainty = 0.0;
    bool proxy = false;  // R1 is a closest-approach proxy, not a multiplier test
    std::string provenance;
};

std::string to_string(Codim2Point::Type t);

/// Saddle-node curve: pseudo-arclength on the tangency system
/// {f1 = D1, f2 = D2, F1' F2' = 1} in (x1, x2, S_in, D), traced both ways
/// from a seed until the window is left.
BifCurve continue_lp_curve(const ModelParams& base, double sin_seed, const State& state_seed,
                           const Window& win);

/// Hopf curve: equilibrium system + c4 = 0 in (S, x1, x2, S_in, D); the
/// trace stops where the c2 > 0 guard fails (that end is the BT point,
/// refined by bisection and stored in bt_out when given). Samples carry
/// omega^2 = c2 and l1.
BifCurve continue_hopf_curve(const ModelParams& base, double sin_seed, const State& state_seed,
                             const Window& win, std::vector<Codim2Point>* bt_out = nullptr);

/// One-parameter scan at fixed D: LP and H from equilibrium continuation,
/// LPC/PD from the cycle family seeded at the Hopf point, Hom from the
/// period-blow-up fit. Events come back sorted by S_in.
struct SliceResult {
    double D = 0.0;
    bool has_hopf = false;
    double sigma_hopf = 0.0;
    double l1 = 0.0;
    std::vector<BifurcationEvent> events;
    std::vector<PeriodCurve> curves;
    bool family_ok = false;
};

struct SliceOptions {
    double sin_lo = 1.0, sin_hi = 4.6;      // equilibrium branch range
    double family_below = 0.06, family_above = 0.06;  // cycle range around the Hopf
    CyclePolicy cycles;
    BranchPolicy branch;
    bool keep_family_curves = true;
};

SliceResult analyze_slice(const ModelParams& base, double D, const SliceOptions& opt = {});

/// D-grid sweep collecting the LPC and PD event clouds; slices run
/// concurrently and the spacing refines x4 around curve turning points
/// (gap collapse near the CPC, top of the PD curve).
struct CycleCurveSweep {
    BifCurve lpc, pd;                 // points ordered by (D, S_in)
    std::vector<SliceResult> slices;  // ascending D
};

CycleCurveSweep sweep_cycle_curves(const ModelParams& base, double d_lo, double d_hi, int n_slices,
                                   const Window& win, const SliceOptions& opt = {});

/// Codimension-two inventory:
///   BT  - c2 -> 0 end of the Hopf curve (cross-checked against the LP curve)
///   GH  - l1 sign change along the Hopf curve, bisected
///   CPC - coalescence of the two per-slice LPC values (quadratic fit of
///         gap^2 against D)
///   R2  - turning point of the PD curve in D
///   R1  - closest approach of the LPC cloud to the Hopf curve (proxy)
/// Every point carries an honest uncertainty (slice spacing or bisection
/// width).
std::vector<Codim2Point> locate_codim2(const BifCurve& lp, const BifCurve& hopf,
                                       const std::vector<Codim2Point>& bt_candidates,
                                       const CycleCurveSweep& sweep);

struct RegionGrid {
    Window win;
    int nx = 0, ny = 0;
    std::vector<std::string> labels;   // row-major, S_in fastest
    std::vector<uint8_t> flagged;      // inventory conflicts with curve side
    double sin_at(int i) const { return win.sin_min + (win.sin_max - win.sin_min) * (i + 0.5) / nx; }
    double d_at(int j) const { return win.d_min + (win.d_max - win.d_min) * (j + 0.5) / ny; }
};

/// Per-cell equilibrium inventory + cycle inventory interpolated from the
/// nearest D slice, mapped onto the region taxonomy (J0, J1^..., J2^...).
RegionGrid classify_regions(const Window& win, int nx, int ny, const ModelParams& base,
                            const CycleCurveSweep& sweep, const BifCurve& lp,
                            const BifCurve& hopf);

/// Operating diagram, colored per the curve table: LP blue, H red,
/// LPC green, PD cyan.
std::string plot_operating_diagram(const Window& win, const BifCurve& lp, const BifCurve& hopf,
                                   const CycleCurveSweep& sweep,
                                   const std::vector<Codim2Point>& codim2);

/// One-parameter bifurcation diagram (S against the free parameter);
/// stable arcs red, unstable blue.
std::string plot_branch_diagram(const Branch& branch, const std::vector<SliceResult>& slices);

/// Period-versus-parameter plot for cycle families.
std::string plot_period_curves(const std::vector<PeriodCurve>& curves);

} // namespace mutbif
