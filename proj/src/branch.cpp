#include "mutbif/branch.hpp"

#include <cmath>

#include "mutbif/continuation.hpp"
#include "mutbif/cubic.hpp"
#include "mutbif/hopf.hpp"

namespace mutbif {

namespace {

ModelParams with_free(const ModelParams& p, FreeParam free, double v) {
    return free == FreeParam::S_in ? p.with_S_in(v) : p.with_D(v);
}

/// Reduced equilibrium system in z = (S, x1, x2, u):
///   D (S_in - S) - D1 x1 - D2 x2 = 0,  f1 - D1 = 0,  f2 - D2 = 0.
struct EqSystem {
    ModelParams base;
    FreeParam free;

    ModelParams params(double u) const { return with_free(base, free, u); }

    Eigen::VectorXd residual(const Eigen::VectorXd& z) const {
        const ModelParams q = params(z[3]);
        Eigen::VectorXd r(3);
        const double S = std::max(z[0], 1e-300), x1 = std::max(z[1], 0.0),
                     x2 = std::max(z[2], 0.0);
        r[0] = q.operating.D * (q.operating.S_in - z[0]) - q.D1() * z[1] - q.D2() * z[2];
        r[1] = growth(1, S, x2, q) - q.D1();
        r[2] = growth(2, S, x1, q) - q.D2();
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const {
        const ModelParams q = params(z[3]);
        const auto [E, G] = growth_partials(1, std::max(z[0], 1e-300), std::max(z[2], 0.0), q);
        const auto [F, H] = growth_partials(2, std::max(z[0], 1e-300), std::max(z[1], 0.0), q);
        Eigen::MatrixXd J(3, 4);
        J(0, 0) = -q.operating.D;
        J(0, 1) = -q.D1();
        J(0, 2) = -q.D2();
        J(1, 0) = E;
        J(1, 1) = 0;
        J(1, 2) = G;
        J(2, 0) = F;
        J(2, 1) = H;
        J(2, 2) = 0;
        if (free == FreeParam::S_in) {
            J(0, 3) = q.operating.D;
            J(1, 3) = 0;
            J(2, 3) = 0;
        } else {
            // D_i = alpha_i D + a_i depends on the free parameter
            J(0, 3) = (q.operating.S_in - z[0]) - q.removal.alpha1 * z[1] -
                      q.removal.alpha2 * z[2];
            J(1, 3) = -q.removal.alpha1;
            J(2, 3) = -q.removal.alpha2;
        }
        return J;
    }
};

BranchPoint make_point(const EqSystem& sys, const Eigen::VectorXd& z, const Eigen::VectorXd& t,
                       double arc) {
    BranchPoint bp;
    bp.param = z[3];
    bp.state = {z[0], z[1], z[2]};
    bp.tangent = t;
    const ModelParams q = sys.params(z[3]);
    bp.rh = routh_hurwitz(bp.state, q);
    const auto eig = cubic_roots(bp.rh.c1, bp.rh.c2, bp.rh.c3);
    bp.mu = eig[0].real();
    bp.nu = 0.0;
    for (const auto& ev : eig) {
        if (ev.imag() > 0) {
            bp.mu = ev.real();
            bp.nu = ev.imag();
        }
    }
    if (bp.nu == 0.0) {
        for (const auto& ev : eig) bp.mu = std::max(bp.mu, ev.real());
    }
    bp.arclength = arc;
    return bp;
}

double test_value(const BranchPoint& b, EventType type) {
    return type == EventType::LP ? b.rh.c3 : b.rh.c4;
}

/// One-sided continuation run; returns points in travel order.
void run_direction(const EqSystem& sys, Pac& pac, Eigen::VectorXd z, Eigen::VectorXd t,
                   double lo, double hi, const BranchPolicy& pol, Branch& out) {
    PacPolicy ppol;
    ppol.h_min = pol.h_min;
    ppol.h_max = pol.h_max;
    ppol.tol = 1e-11;

    double h = pol.h0;
    int successes = 0;
    double arc = 0.0;
    BranchPoint prev = make_point(sys, z, t, arc);

    auto locate = [&](const Eigen::VectorXd& za, const Eigen::VectorXd& ta, double ha,
                      EventType type) -> std::optional<BifurcationEvent> {
        // secant on the step fraction s in [0,1] along the latest segment
        double s0 = 0.0, s1 = 1.0;
        BranchPoint p0 = prev;
        Eigen::VectorXd zb = za;  // refined point storage
        double f0 = test_value(p0, type);
        auto eval = [&](double s) -> std::optional<BranchPoint> {
            const Eigen::VectorXd zp = za + (s * ha) * ta;
            const auto zc = pac.correct(zp, ta, ppol);
            if (!zc) return std::nullopt;
            zb = *zc;
            return make_point(sys, *zc, ta, 0.0);
        };
        auto p1o = eval(1.0);
        if (!p1o) return std::nullopt;
        double f1 = test_value(*p1o, type);
        double s_mid = s1;
        BranchPoint pm = *p1o;
        for (int it = 0; it < 60; ++it) {
            if (std::abs(f1 - f0) < 1e-300) break;
            s_mid = s1 - f1 * (s1 - s0) / (f1 - f0);
            if (!(s_mid > std::min(s0, s1) && s_mid < std::max(s0, s1)))
                s_mid = 0.5 * (s0 + s1);
            auto pmo = eval(s_mid);
            if (!pmo) return std::nullopt;
            pm = *pmo;
            const double fm = test_value(pm, type);
            if (std::abs(fm) < 1e-10) break;
            if ((fm <= 0) == (f0 <= 0)) {
                s0 = s_mid;
                f0 = fm;
            } else {
                s1 = s_mid;
                f1 = fm;
            }
        }
        BifurcationEvent ev;
        ev.type = type;
        ev.param = pm.param;
        ev.state = pm.state;
        ev.rh = pm.rh;
        ev.mu = pm.mu;
        ev.nu = pm.nu;
        ev.test_residual = std::abs(test_value(pm, type));
        if (type == EventType::H) {
            if (!(pm.rh.c2 > 0 && pm.rh.c3 > 0)) return std::nullopt;  // neutral saddle
            ev.l1 = lyapunov_l1(pm.state, sys.params(pm.param));
        }
        return ev;
    };

    for (int step = 0; step < pol.max_steps; ++step) {
        const Eigen::VectorXd z_pred = z + h * t;
        const auto zc = pac.correct(z_pred, t, ppol);
        if (!zc || (*zc)[1] < 1e-12 || (*zc)[2] < 1e-12 || (*zc)[0] < 1e-12) {
            h *= 0.5;
            successes = 0;
            if (h < pol.h_min) {
                BifurcationEvent ev;
                ev.type = EventType::branch_end;
                ev.param = prev.param;
                ev.state = prev.state;
                out.events.push_back(ev);
                return;
            }
            continue;
        }
        const Eigen::VectorXd z_new = *zc;
        arc += h;
        const Eigen::VectorXd t_new = pac.tangent(z_new, t);
        BranchPoint cur = make_point(sys, z_new, t_new, arc);

        for (EventType type : {EventType::LP, EventType::H}) {
            const double f0 = test_value(prev, type), f1 = test_value(cur, type);
            if ((f0 <= 0) != (f1 <= 0)) {
                if (auto ev = locate(z, t, h, type)) out.events.push_back(*ev);
            }
        }

        out.points.push_back(cur);
        prev = cur;
        z = z_new;
        t = t_new;
        if (++successes >= 3) {
            h = std::min(h * 1.3, pol.h_max);
            successes = 0;
        }
        if (z[3] < lo || z[3] > hi) {
            out.hit_range_end = true;
            return;
        }
    }
}

} // namespace

Branch continue_equilibria(const Equilibrium& start, const ModelParams& p, FreeParam free,
                           double lo, double hi, const BranchPolicy& pol) {
    p.validate();
    if (start.kind != EquilibriumKind::coexistence)
        throw std::invalid_argument("continue_equilibria: washout branch is constant");

    EqSystem sys{p, free};
    Pac pac([&sys](const Eigen::VectorXd& z) { return sys.residual(z); },
            [&sys](const Eigen::VectorXd& z) { return sys.jacobian(z); },
            Eigen::Vector4d::Ones());

    Eigen::VectorXd z(4);
    z << start.state.S, start.state.x1, start.state.x2,
        (free == FreeParam::S_in ? p.operating.S_in : p.operating.D);
    if (sys.residual(z).lpNorm<Eigen::Infinity>() > 1e-10)
        throw std::invalid_argument("continue_equilibria: start residual exceeds 1e-10");

    Eigen::VectorXd t0 = pac.tangent(z, Eigen::VectorXd::Zero(4));
    if (t0[3] < 0) t0 = -t0;  // first leg travels toward increasing parameter

    Branch fw, bw;
    fw.free = bw.free = free;
    run_direction(sys, pac, z, t0, lo, hi, pol, fw);
    run_direction(sys, pac, z, -t0, lo, hi, pol, bw);

    // merge: backward leg reversed, then start, then forward leg
    Branch out;
    out.free = free;
    out.hit_range_end = fw.hit_range_end && bw.hit_range_end;
    for (auto it = bw.points.rbegin(); it != bw.points.rend(); ++it) out.points.push_back(*it);
    out.points.push_back(make_point(sys, z, t0, 0.0));
    for (auto& q : fw.points) out.points.push_back(q);
    double arc = 0.0;
    for (size_t k = 0; k < out.points.size(); ++k) {
        if (k > 0)
            arc += (to_vector(out.points[k].state) - to_vector(out.points[k - 1].state)).norm() +
                   std::abs(out.points[k].param - out.points[k - 1].param);
        out.points[k].arclength = arc;
    }
    out.events = bw.events;
    out.events.insert(out.events.end(), fw.events.begin(), fw.events.end());
    std::sort(out.events.begin(), out.events.end(),
              [](const BifurcationEvent& a, const BifurcationEvent& b) { return a.param < b.param; });
    return out;
}

std::optional<Equilibrium> solve_equilibrium_at(const ModelParams& p, const State& guess) {
    EqSystem sys{p, FreeParam::S_in};
    Eigen::VectorXd z(4);
    z << guess.S, guess.x1, guess.x2, p.operating.S_in;
    for (int it = 0; it < 50; ++it) {
        const Eigen::VectorXd r = sys.residual(z);
        if (r.lpNorm<Eigen::Infinity>() < 1e-13) break;
        const Eigen::Matrix3d J = sys.jacobian(z).leftCols<3>();
        const Eigen::Vector3d dz = J.partialPivLu().solve(r);
        if (!dz.allFinite()) return std::nullopt;
        z.head<3>() -= dz;
    }
    if (sys.residual(z).lpNorm<Eigen::Infinity>() > 1e-11) return std::nullopt;
    Equilibrium eq;
    eq.state = {z[0], z[1], z[2]};
    eq.kind = EquilibriumKind::coexistence;
    return classify(eq, p);
}

double transversality(const BifurcationEvent& h_event, const ModelParams& p, FreeParam free,
                      double rel_step) {
    const double u0 = h_event.param;
    const double h = rel_step * (1.0 + std::abs(u0));
    auto mu_at = [&](double u) {
        const ModelParams q = with_free(p, free, u);
        const auto eq = solve_equilibrium_at(q, h_event.state);
        if (!eq) throw std::runtime_error("transversality: equilibrium solve failed");
        for (const auto& ev : eq->eigenvalues)
            if (ev.imag() > 0) return ev.real();
        throw std::runtime_error("transversality: eigenvalue pair lost near the event");
    };
    return (mu_at(u0 + h) - mu_at(u0 - h)) / (2 * h);
}

} // namespace mutbif
