#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

namespace mutbif {

/// Step policy for pseudo-arclength continuation: halve on corrector
/// failure, grow by `grow` after `grow_after` consecutive successes.
struct PacPolicy {
    double h0 = 1e-3;
    double h_min = 1e-6;
    double h_max = 0.05;
    double grow = 1.3;
    double shrink = 0.5;
    int grow_after = 3;
    int newton_max = 20;
    double tol = 1e-11;  // residual infinity norm
};

/// Dense pseudo-arclength continuation over a system R(z) = 0 with
/// dim(z) = neq + 1. The weighted inner product diag(w) defines arclength;
/// components with small weights (a cycle period, say) may travel far per
/// step.
class Pac {
  public:
    using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
    using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;  // neq x (neq+1)

    Pac(ResidualFn r, JacobianFn j, Eigen::VectorXd weights)
        : r_(std::move(r)), j_(std::move(j)), w_(std::move(weights)) {}

    /// Unit tangent (in the weighted norm) continuing the orientation of
    /// prev, or an arbitrary orientation when prev is zero.
    Eigen::VectorXd tangent(const Eigen::VectorXd& z, const Eigen::VectorXd& prev) const;

    /// Newton with the hyperplane constraint t' W^2 (z - z_pred) = 0.
    std::optional<Eigen::VectorXd> correct(const Eigen::VectorXd& z_pred,
                                           const Eigen::VectorXd& t, const PacPolicy& pol) const;

    /// Newton at a pinned coordinate: z[fixed] stays at its predicted value.
    std::optional<Eigen::VectorXd> correct_pinned(const Eigen::VectorXd& z_guess, int fixed,
                                                  const PacPolicy& pol) const;

    const Eigen::VectorXd& weights() const { return w_; }

  private:
    ResidualFn r_;
    JacobianFn j_;
    Eigen::VectorXd w_;
};

/// Central finite-difference Jacobian for systems without analytic ones.
Eigen::MatrixXd fd_jacobian(const Pac::ResidualFn& r, const Eigen::VectorXd& z, int neq);

} // namespace mutbif
