#include "mutbif/hopf.hpp"

#include <cmath>

#include "mutbif/continuation.hpp"

namespace mutbif {

Eigen::Vector3cd eigenvector3(const Eigen::Matrix3cd& A, std::complex<double> lambda) {
    Eigen::Matrix3cd M = A;
    M.diagonal().array() -= lambda;
    Eigen::Vector3cd best = Eigen::Vector3cd::Zero();
    double best_norm = -1.0;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto& pr : pairs) {
        const Eigen::Vector3cd u = M.row(pr[0]), v = M.row(pr[1]);
        // Eigen's complex cross() conjugates componentwise; undo it so the
        // result lies in the (bilinear) nullspace of M
        const Eigen::Vector3cd c = u.cross(v).conjugate();
        if (c.norm() > best_norm) {
            best_norm = c.norm();
            best = c;
        }
    }
    if (best_norm <= 0) throw std::runtime_error("eigenvector3: degenerate matrix");
    return best / best.norm();
}

namespace {

using C3 = Eigen::Vector3cd;

struct Tensors {
    // H2[k](i,j) = d^2 f_k / dx_i dx_j,  H3[k](i,j,l) likewise at third order
    double H2[3][3][3] = {};
    double H3[3][3][3][3] = {};
};

Tensors derivative_tensors(const State& x0, const ModelParams& p) {
    Tensors T;
    const double h = 1e-4;
    auto at = [&](double d0, double d1, double d2) {
        return jacobian({x0.S + d0, x0.x1 + d1, x0.x2 + d2}, p);
    };
    for (int j = 0; j < 3; ++j) {
        double e[3] = {0, 0, 0};
        e[j] = h;
        const Eigen::Matrix3d Jp = at(e[0], e[1], e[2]);
        const Eigen::Matrix3d Jm = at(-e[0], -e[1], -e[2]);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i) T.H2[k][i][j] = (Jp(k, i) - Jm(k, i)) / (2 * h);
    }
    // symmetrize in (i,j)
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double s = 0.5 * (T.H2[k][i][j] + T.H2[k][j][i]);
                T.H2[k][i][j] = T.H2[k][j][i] = s;
            }
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
            double ej[3] = {0, 0, 0}, el[3] = {0, 0, 0};
            ej[j] = h;
            el[l] = h;
            const Eigen::Matrix3d Jpp = at(ej[0] + el[0], ej[1] + el[1], ej[2] + el[2]);
            const Eigen::Matrix3d Jpm = at(ej[0] - el[0], ej[1] - el[1], ej[2] - el[2]);
            const Eigen::Matrix3d Jmp = at(-ej[0] + el[0], -ej[1] + el[1], -ej[2] + el[2]);
            const Eigen::Matrix3d Jmm = at(-ej[0] - el[0], -ej[1] - el[1], -ej[2] - el[2]);
            for (int k = 0; k < 3; ++k)
                for (int i = 0; i < 3; ++i)
                    T.H3[k][i][j][l] = (Jpp(k, i) - Jpm(k, i) - Jmp(k, i) + Jmm(k, i)) / (4 * h * h);
        }
    return T;
}

C3 bilinear(const Tensors& T, const C3& u, const C3& v) {
    C3 out = C3::Zero();
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out[k] += T.H2[k][i][j] * u[i] * v[j];
    return out;
}

C3 trilinear(const Tensors& T, const C3& u, const C3& v, const C3& w) {
    C3 out = C3::Zero();
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int l = 0; l < 3; ++l) out[k] += T.H3[k][i][j][l] * u[i] * v[j] * w[l];
    return out;
}

} // namespace

double lyapunov_l1(const State& hopf_state, const ModelParams& p, const Eigen::Vector3cd& q_seed) {
    const RouthHurwitz rh = routh_hurwitz(hopf_state, p);
    if (!(rh.c2 > 1e-10))
        throw std::runtime_error("lyapunov_l1: imaginary pair degenerates (c2 <= 0, near BT)");
    const double omega = std::sqrt(rh.c2);
    const Eigen::Matrix3d A = jacobian(hopf_state, p);
    const Eigen::Matrix3cd Ac = A.cast<std::complex<double>>();
    const std::complex<double> iw(0.0, omega);

    C3 q = eigenvector3(Ac, iw);
    if (q_seed.norm() > 0) {
        // project the seed onto the eigenspace direction: keep q but fix the
        // phase/scale from the seed so rescaling invariance is exercised
        const std::complex<double> a = q.dot(q_seed);  // Eigen conjugates the left factor
        if (std::abs(a) > 1e-12) q *= a / std::abs(a) * q_seed.norm();
    }
    C3 pv = eigenvector3(Ac.transpose(), -iw);
    const std::complex<double> scale = pv.dot(q);  // Eigen dot: sum conj(p_i) q_i
    if (std::abs(scale) < 1e-14) throw std::runtime_error("lyapunov_l1: defective eigenpair");
    pv /= std::conj(scale);

    const Tensors T = derivative_tensors(hopf_state, p);
    const C3 qb = q.conjugate();
    auto dotp = [&](const C3& v) { return pv.dot(v); };

    const C3 Bqqb = bilinear(T, q, qb);
    const C3 Bqq = bilinear(T, q, q);
    const Eigen::Vector3cd s1 = Ac.partialPivLu().solve(Bqqb);
    Eigen::Matrix3cd shifted = 2.0 * iw * Eigen::Matrix3cd::Identity() - Ac;
    const Eigen::Vector3cd s2 = shifted.partialPivLu().solve(Bqq);

    const std::complex<double> total =
        dotp(trilinear(T, q, q, qb)) - 2.0 * dotp(bilinear(T, q, s1)) + dotp(bilinear(T, qb, s2));
    return total.real() / (2.0 * omega);
}

double lyapunov_l1(const State& hopf_state, const ModelParams& p) {
    return lyapunov_l1(hopf_state, p, Eigen::Vector3cd::Zero());
}

std::optional<HopfPoint> solve_hopf_at_D(const ModelParams& p, double sin_guess,
                                         const State& state_guess) {
    // unknowns z = (S, x1, x2, S_in); four equations
    auto residual = [&p](const Eigen::VectorXd& z) {
        ModelParams q = p.with_S_in(z[3]);
        Eigen::VectorXd r(4);
        const State s{z[0], z[1], z[2]};
        r[0] = q.operating.D * (z[3] - z[0]) - q.D1() * z[1] - q.D2() * z[2];
        r[1] = growth(1, std::max(z[0], 0.0), std::max(z[2], 0.0), q) - q.D1();
        r[2] = growth(2, std::max(z[0], 0.0), std::max(z[1], 0.0), q) - q.D2();
        r[3] = routh_hurwitz(s, q).c4;
        return r;
    };
    Eigen::VectorXd z(4);
    z << state_guess.S, state_guess.x1, state_guess.x2, sin_guess;
    for (int it = 0; it < 60; ++it) {
        const Eigen::VectorXd r = residual(z);
        if (r.lpNorm<Eigen::Infinity>() < 1e-12) break;
        const Eigen::MatrixXd J = fd_jacobian(residual, z, 4);
        const Eigen::VectorXd dz = J.partialPivLu().solve(r);
        if (!dz.allFinite()) return std::nullopt;
        z -= dz;
    }
    if (residual(z).lpNorm<Eigen::Infinity>() >= 1e-10) return std::nullopt;
    HopfPoint h;
    h.state = {z[0], z[1], z[2]};
    h.S_in = z[3];
    const RouthHurwitz rh = routh_hurwitz(h.state, p.with_S_in(z[3]));
    if (!(rh.c2 > 0 && rh.c3 > 0)) return std::nullopt;
    h.omega = std::sqrt(rh.c2);
    h.l1 = lyapunov_l1(h.state, p.with_S_in(z[3]));
    return h;
}

} // namespace mutbif
