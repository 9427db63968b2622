#include "mutbif/continuation.hpp"

namespace mutbif {

Eigen::VectorXd Pac::tangent(const Eigen::VectorXd& z, const Eigen::VectorXd& prev) const {
    const int n = static_cast<int>(z.size());
    Eigen::MatrixXd A(n, n);
    A.topRows(n - 1) = j_(z);
    if (prev.size() == n && prev.norm() > 0)
        A.row(n - 1) = (w_.array().square() * prev.array()).matrix().transpose();
    else
        A.row(n - 1) = Eigen::RowVectorXd::Unit(n, n - 1);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[n - 1] = 1.0;
    Eigen::VectorXd t = A.partialPivLu().solve(e);
    const double nrm = std::sqrt((w_.array() * t.array()).matrix().squaredNorm());
    t /= nrm;
    if (prev.size() == n && prev.norm() > 0 &&
        (w_.array().square() * prev.array()).matrix().dot(t) < 0)
        t = -t;
    return t;
}

std::optional<Eigen::VectorXd> Pac::correct(const Eigen::VectorXd& z_pred,
                                            const Eigen::VectorXd& t, const PacPolicy& pol) const {
    const int n = static_cast<int>(z_pred.size());
    Eigen::VectorXd z = z_pred;
    const Eigen::RowVectorXd row = (w_.array().square() * t.array()).matrix().transpose();
    for (int it = 0; it < pol.newton_max; ++it) {
        Eigen::VectorXd r = r_(z);
        const double arc = row.dot(z - z_pred);
        double nr = std::max(r.lpNorm<Eigen::Infinity>(), std::abs(arc));
        if (nr < pol.tol) return z;
        Eigen::MatrixXd A(n, n);
        A.topRows(n - 1) = j_(z);
        A.row(n - 1) = row;
        Eigen::VectorXd b(n);
        b.head(n - 1) = -r;
        b[n - 1] = -arc;
        const Eigen::VectorXd dz = A.partialPivLu().solve(b);
        if (!dz.allFinite()) return std::nullopt;
        z += dz;
        if (dz.lpNorm<Eigen::Infinity>() > 1e6) return std::nullopt;
    }
    Eigen::VectorXd r = r_(z);
    if (r.lpNorm<Eigen::Infinity>() < pol.tol) return z;
    return std::nullopt;
}

std::optional<Eigen::VectorXd> Pac::correct_pinned(const Eigen::VectorXd& z_guess, int fixed,
                                                   const PacPolicy& pol) const {
    const int n = static_cast<int>(z_guess.size());
    Eigen::VectorXd z = z_guess;
    for (int it = 0; it < pol.newton_max; ++it) {
        Eigen::VectorXd r = r_(z);
        if (r.lpNorm<Eigen::Infinity>() < pol.tol) return z;
        Eigen::MatrixXd A(n, n);
        A.topRows(n - 1) = j_(z);
        A.row(n - 1) = Eigen::RowVectorXd::Unit(n, fixed);
        Eigen::VectorXd b(n);
        b.head(n - 1) = -r;
        b[n - 1] = 0.0;
        const Eigen::VectorXd dz = A.partialPivLu().solve(b);
        if (!dz.allFinite()) return std::nullopt;
        z += dz;
    }
    Eigen::VectorXd r = r_(z);
    if (r.lpNorm<Eigen::Infinity>() < pol.tol) return z;
    return std::nullopt;
}

Eigen::MatrixXd fd_jacobian(const Pac::ResidualFn& r, const Eigen::VectorXd& z, int neq) {
    const int n = static_cast<int>(z.size());
    Eigen::MatrixXd J(neq, n);
    for (int k = 0; k < n; ++k) {
        const double h = 1e-7 * (1.0 + std::abs(z[k]));
        Eigen::VectorXd zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        J.col(k) = (r(zp) - r(zm)) / (2 * h);
    }
    return J;
}

} // namespace mutbif
