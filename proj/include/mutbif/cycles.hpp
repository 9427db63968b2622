#pragma once

#include <optional>
#include <vector>

#include "mutbif/branch.hpp"
#include "mutbif/hopf.hpp"

namespace mutbif {

/// Periodic orbit as a multiple-shooting mesh: m node states, period T and
/// the free-parameter value (S_in). The trivial Floquet multiplier sits
/// within 1e-6 of +1; stability is read off the remaining two.
struct LimitCycle {
    std::vector<State> nodes;
    double period = 0.0;
    double param = 0.0;  // S_in
    std::array<std::complex<double>, 3> multipliers{};
    bool stable = false;
    State anchor{};
    State anchor_velocity{};
};

struct CyclePoint {
    double param = 0.0;
    double T = 0.0;
    State node0{};
    std::array<std::complex<double>, 3> multipliers{};
    bool stable = false;
    bool multipliers_reliable = true;
    double tangent_param = 0.0;  // free-parameter component of the unit tangent
    Eigen::VectorXd z;           // (nodes, T, param) for event refinement
    Eigen::VectorXd tangent;
};

struct CycleFamily {
    std::vector<CyclePoint> points;
    std::vector<BifurcationEvent> events;        // LPC / PD / branch_end
    std::vector<LimitCycle> event_cycles;        // parallel to events
    std::vector<std::pair<double, double>> tail; // (param, T) markers of a period blow-up
    bool blew_up = false;                        // T exceeded T_max (homoclinic side)
    bool hit_range_end = false;
};

struct CyclePolicy {
    int segments = 20;
    double seg_tol = 1e-11;      // per-segment relative tolerance (abs 1e-13)
    double h0 = 1e-3;
    double h_min = 1e-7;
    double h_max = 0.02;
    double w_T = 0.01;           // weight of T in the arclength metric
    double max_dparam = 5e-3;    // reject steps that travel further than this
    double max_dT = 1.5;
    double T_trigger = 100.0;    // period blow-up trigger
    double T_max = 220.0;
    double tail_start = 25.0;    // begin recording fit markers here
    double tail_spacing = 7.0;   // record a tail marker per this much period growth
    int fit_points = 8;
    int max_steps = 40000;
    double mult_reliable = 1e8;  // multipliers numerically meaningful below this
    double pd_mult_gate = 1e3;   // PD flips trusted only at moderate magnitudes
    double residual_tol = 1e-9;
};

/// Multiple-shooting machinery shared by the seeding, continuation and
/// Floquet paths. z layout: (m node states, T, S_in).
class ShootingSystem {
  public:
    ShootingSystem(const ModelParams& base, const CyclePolicy& pol);

    int segments() const { return m_; }
    int dim() const { return 3 * m_ + 2; }
    int rows() const { return 3 * m_ + 1; }  // matching + closure + phase

    void set_anchor(const State& point, const State& velocity);
    void anchor_from(const Eigen::VectorXd& z);

    /// Residual (3m+1) and Jacobian (3m+1)x(3m+2); segment transition
    /// matrices published for the monodromy. Results are cached by z.
    const Eigen::VectorXd& residual(const Eigen::VectorXd& z);
    const Eigen::MatrixXd& jacobian(const Eigen::VectorXd& z);
    Eigen::Matrix3d monodromy(const Eigen::VectorXd& z);

    const ModelParams& base() const { return base_; }
    ModelParams params_at(double s_in) const { return base_.with_S_in(s_in); }

    static std::vector<State> unpack_nodes(const Eigen::VectorXd& z, int m);

  private:
    void assemble(const Eigen::VectorXd& z);

    ModelParams base_;
    int m_;
    double tol_;
    State anchor_{}, anchor_vel_{};
    Eigen::VectorXd cached_z_;
    Eigen::VectorXd R_;
    Eigen::MatrixXd J_;
    std::vector<Eigen::Matrix3d> segs_;
};

/// Seeds a cycle on the center eigenplane of a located Hopf point with
/// radius `amplitude` (period guess 2 pi / omega) and converges the shooting
/// system with an amplitude pin in place of the parameter. One retry at
/// 5x amplitude. Throws on Newton failure.
LimitCycle cycle_from_hopf(const BifurcationEvent& hopf, const ModelParams& p,
                           const CyclePolicy& pol = {}, double amplitude = 1e-3);

/// Pseudo-arclength continuation of a cycle family in S_in over [lo, hi].
/// Events: LPC at sign changes of the tangent's parameter component, PD at a
/// nontrivial real multiplier crossing -1 (only while multipliers are
/// numerically trustworthy), both refined by secant to |test| < 1e-8.
/// A monotone period blow-up past T_trigger records tail markers for the
/// homoclinic fit and ends the family at T_max.
CycleFamily continue_cycles(const LimitCycle& start, const ModelParams& p, double lo, double hi,
                            const CyclePolicy& pol = {});

/// Floquet multipliers of a converged cycle (monodromy eigenvalues).
std::array<std::complex<double>, 3> floquet(const LimitCycle& cycle, const ModelParams& p,
                                            const CyclePolicy& pol = {});

/// Integral of div(rhs) along the cycle; exp of it equals the multiplier
/// product (Liouville).
double divergence_integral(const LimitCycle& cycle, const ModelParams& p, double tol = 1e-11);

/// Log fit T = a - b ln(sigma - sigma_hom) over the family's last tail
/// markers; golden-section on sigma_hom, linear least squares in (a, b).
/// Unresolved (nullopt) on a non-monotone tail or R^2 < 0.99.
std::optional<BifurcationEvent> detect_homoclinic(const CycleFamily& family,
                                                  const CyclePolicy& pol = {});

struct PeriodCurve {
    std::string label;  // C1, C2, C3
    std::vector<double> param, T;
    std::vector<bool> stable;
};

/// Splits a family at its LPC events into consecutively labelled curves
/// (C1 from the Hopf end, then C2, C3).
std::vector<PeriodCurve> period_curve(const CycleFamily& family);

} // namespace mutbif
