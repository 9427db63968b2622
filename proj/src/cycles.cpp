#include "mutbif/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mutbif/continuation.hpp"
#include "mutbif/cubic.hpp"
#include "mutbif/rk45.hpp"

namespace mutbif {

namespace {

/// Augmented segment ODE: state (3), transition matrix (9, column-major),
/// S_in-sensitivity (3).
struct SegmentOde {
    const ModelParams& p;
    void operator()(double, const double* z, double* dz) const {
        // clamp: Newton iterates may transiently leave the orthant
        const State y{std::max(z[0], 0.0), std::max(z[1], 0.0), std::max(z[2], 0.0)};
        const State f = rhs(y, p);
        dz[0] = f.S;
        dz[1] = f.x1;
        dz[2] = f.x2;
        const Eigen::Matrix3d J = jacobian(y, p);
        Eigen::Map<const Eigen::Matrix3d> Phi(z + 3);
        Eigen::Map<Eigen::Matrix3d> dPhi(dz + 3);
        dPhi = J * Phi;
        Eigen::Map<const Eigen::Vector3d> psi(z + 12);
        Eigen::Map<Eigen::Vector3d> dpsi(dz + 12);
        dpsi = J * psi;
        dpsi[0] += p.operating.D;  // d rhs / d S_in
    }
};

double psi_pd(const std::array<std::complex<double>, 3>& mults) {
    // most negative real nontrivial multiplier, shifted so PD crosses zero;
    // NaN when no real negative multiplier exists (a flip multiplier is real
    // on both sides of a genuine doubling, so complex<->real transitions
    // must not fake sign changes)
    int trivial = 0;
    double best = HUGE_VAL;
    for (int k = 0; k < 3; ++k) {
        const double d = std::abs(mults[k] - 1.0);
        if (d < best) {
            best = d;
            trivial = k;
        }
    }
    double v = HUGE_VAL;
    for (int k = 0; k < 3; ++k) {
        if (k == trivial) continue;
        if (std::abs(mults[k].imag()) < 1e-8 * (1.0 + std::abs(mults[k].real())) &&
            mults[k].real() < 0.0)
            v = std::min(v, mults[k].real());
    }
    if (v == HUGE_VAL) return std::numeric_limits<double>::quiet_NaN();
    return v + 1.0;
}

bool cycle_stable(const std::array<std::complex<double>, 3>& mults) {
    int trivial = 0;
    double best = HUGE_VAL;
    for (int k = 0; k < 3; ++k) {
        const double d = std::abs(mults[k] - 1.0);
        if (d < best) {
            best = d;
            trivial = k;
        }
    }
    for (int k = 0; k < 3; ++k)
        if (k != trivial && std::abs(mults[k]) > 1.0 + 1e-6) return false;
    return true;
}

double max_nontrivial(const std::array<std::complex<double>, 3>& mults) {
    double v = 0;
    for (const auto& m : mults) {
        const double a = std::abs(m);
        if (!std::isfinite(a)) return HUGE_VAL;  // monodromy overflow near blow-up
        v = std::max(v, a);
    }
    return v;
}

} // namespace

ShootingSystem::ShootingSystem(const ModelParams& base, const CyclePolicy& pol)
    : base_(base), m_(pol.segments), tol_(pol.seg_tol) {}

void ShootingSystem::set_anchor(const State& point, const State& velocity) {
    anchor_ = point;
    anchor_vel_ = velocity;
    cached_z_.resize(0);
}

void ShootingSystem::anchor_from(const Eigen::VectorXd& z) {
    const State n0{z[0], z[1], z[2]};
    set_anchor(n0, rhs(n0, params_at(z[3 * m_ + 1])));
}

std::vector<State> ShootingSystem::unpack_nodes(const Eigen::VectorXd& z, int m) {
    std::vector<State> nodes(m);
    for (int k = 0; k < m; ++k) nodes[k] = {z[3 * k], z[3 * k + 1], z[3 * k + 2]};
    return nodes;
}

void ShootingSystem::assemble(const Eigen::VectorXd& z) {
    if (cached_z_.size() == z.size() && cached_z_ == z) return;
    const int n = dim();
    const double T = z[3 * m_], s_in = z[3 * m_ + 1];
    const ModelParams p = params_at(s_in);
    const double h = T / m_;

    R_.setZero(rows());
    J_.setZero(rows(), n);
    segs_.assign(m_, Eigen::Matrix3d::Identity());

    SegmentOde ode{p};
    for (int k = 0; k < m_; ++k) {
        double buf[15];
        buf[0] = z[3 * k];
        buf[1] = z[3 * k + 1];
        buf[2] = z[3 * k + 2];
        Eigen::Map<Eigen::Matrix3d>(buf + 3).setIdentity();
        buf[12] = buf[13] = buf[14] = 0.0;
        dopri5(ode, 15, 0.0, h, buf, tol_, tol_ * 1e-2, nullptr);

        const int kp = (k + 1) % m_;
        const State end{buf[0], buf[1], buf[2]};
        R_[3 * k + 0] = end.S - z[3 * kp + 0];
        R_[3 * k + 1] = end.x1 - z[3 * kp + 1];
        R_[3 * k + 2] = end.x2 - z[3 * kp + 2];

        Eigen::Map<const Eigen::Matrix3d> Phi(buf + 3);
        segs_[k] = Phi;
        J_.block<3, 3>(3 * k, 3 * k) = Phi;
        J_.block<3, 3>(3 * k, 3 * kp) -= Eigen::Matrix3d::Identity();
        const State fe = rhs(end, p);
        J_(3 * k + 0, 3 * m_) = fe.S / m_;
        J_(3 * k + 1, 3 * m_) = fe.x1 / m_;
        J_(3 * k + 2, 3 * m_) = fe.x2 / m_;
        J_(3 * k + 0, 3 * m_ + 1) = buf[12];
        J_(3 * k + 1, 3 * m_ + 1) = buf[13];
        J_(3 * k + 2, 3 * m_ + 1) = buf[14];
    }
    // phase: <v_ref, node0 - anchor> = 0
    R_[3 * m_] = anchor_vel_.S * (z[0] - anchor_.S) + anchor_vel_.x1 * (z[1] - anchor_.x1) +
                 anchor_vel_.x2 * (z[2] - anchor_.x2);
    J_(3 * m_, 0) = anchor_vel_.S;
    J_(3 * m_, 1) = anchor_vel_.x1;
    J_(3 * m_, 2) = anchor_vel_.x2;

    cached_z_ = z;
}

const Eigen::VectorXd& ShootingSystem::residual(const Eigen::VectorXd& z) {
    assemble(z);
    return R_;
}

const Eigen::MatrixXd& ShootingSystem::jacobian(const Eigen::VectorXd& z) {
    assemble(z);
    return J_;
}

Eigen::Matrix3d ShootingSystem::monodromy(const Eigen::VectorXd& z) {
    assemble(z);
    Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
    for (const auto& S : segs_) M = S * M;
    return M;
}

namespace {

LimitCycle cycle_from_z(ShootingSystem& sys, const Eigen::VectorXd& z) {
    LimitCycle c;
    const int m = sys.segments();
    c.nodes = ShootingSystem::unpack_nodes(z, m);
    c.period = z[3 * m];
    c.param = z[3 * m + 1];
    c.multipliers = eigenvalues3(sys.monodromy(z));
    c.stable = cycle_stable(c.multipliers);
    c.anchor = c.nodes[0];
    c.anchor_velocity = rhs(c.anchor, sys.params_at(c.param));
    return c;
}

CyclePoint point_from_z(ShootingSystem& sys, const Eigen::VectorXd& z,
                        const Eigen::VectorXd& tangent, const CyclePolicy& pol) {
    CyclePoint pt;
    const int m = sys.segments();
    pt.param = z[3 * m + 1];
    pt.T = z[3 * m];
    pt.node0 = {z[0], z[1], z[2]};
    pt.multipliers = eigenvalues3(sys.monodromy(z));
    pt.stable = cycle_stable(pt.multipliers);
    pt.multipliers_reliable = max_nontrivial(pt.multipliers) < pol.mult_reliable;
    pt.tangent_param = tangent.size() ? tangent[3 * m + 1] : 0.0;
    pt.z = z;
    pt.tangent = tangent;
    return pt;
}

Eigen::VectorXd arc_weights(int m, const CyclePolicy& pol) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(3 * m + 2);
    w[3 * m] = pol.w_T;
    return w;
}

} // namespace

LimitCycle cycle_from_hopf(const BifurcationEvent& hopf, const ModelParams& p,
                           const CyclePolicy& pol, double amplitude) {
    if (!(hopf.nu > 0)) throw std::invalid_argument("cycle_from_hopf: event lacks nu > 0");
    const ModelParams ph = p.with_S_in(hopf.param);
    const Eigen::Matrix3d A = jacobian(hopf.state, ph);
    const double omega = hopf.nu;
    const Eigen::Vector3cd q =
        eigenvector3(A.cast<std::complex<double>>(), std::complex<double>(0.0, omega));
    const Eigen::Vector3d re = q.real(), im = q.imag();
    Eigen::Vector3d pin = re;
    if (pin.norm() < 1e-12) pin = im;
    pin.normalize();

    ShootingSystem sys(p, pol);
    const int m = sys.segments();
    const Eigen::Vector3d x0 = to_vector(hopf.state);

    for (int attempt = 0; attempt < 2; ++attempt) {
        const double amp = amplitude * (attempt == 0 ? 1.0 : 5.0);
        Eigen::VectorXd z(3 * m + 2);
        for (int k = 0; k < m; ++k) {
            const double phase = 2.0 * M_PI * k / m;
            const Eigen::Vector3d node =
                x0 + amp * (re * std::cos(phase) - im * std::sin(phase));
            z.segment<3>(3 * k) = node;
        }
        z[3 * m] = 2.0 * M_PI / omega;
        z[3 * m + 1] = hopf.param;
        sys.anchor_from(z);

        bool ok = false;
        for (int it = 0; it < 30; ++it) {
            const Eigen::VectorXd& R = sys.residual(z);
            const double amp_res = pin.dot(z.head<3>() - x0) - amp;
            double nr = std::max(R.lpNorm<Eigen::Infinity>(), std::abs(amp_res));
            if (nr < pol.residual_tol * 0.3) {
                ok = true;
                break;
            }
            Eigen::MatrixXd Afull(3 * m + 2, 3 * m + 2);
            Afull.topRows(3 * m + 1) = sys.jacobian(z);
            Afull.row(3 * m + 1).setZero();
            Afull.block<1, 3>(3 * m + 1, 0) = pin.transpose();
            Eigen::VectorXd b(3 * m + 2);
            b.head(3 * m + 1) = -R;
            b[3 * m + 1] = -amp_res;
            const Eigen::VectorXd dz = Afull.partialPivLu().solve(b);
            if (!dz.allFinite()) break;
            z += dz;
        }
        if (ok) return cycle_from_z(sys, z);
    }
    throw std::runtime_error("cycle_from_hopf: shooting Newton failed at both amplitudes");
}

CycleFamily continue_cycles(const LimitCycle& start, const ModelParams& p, double lo, double hi,
                            const CyclePolicy& pol) {
    CycleFamily fam;
    ShootingSystem sys(p, pol);
    const int m = sys.segments();
    if (static_cast<int>(start.nodes.size()) != m)
        throw std::invalid_argument("continue_cycles: node count differs from policy segments");

    Eigen::VectorXd z(3 * m + 2);
    for (int k = 0; k < m; ++k) z.segment<3>(3 * k) = to_vector(start.nodes[k]);
    z[3 * m] = start.period;
    z[3 * m + 1] = start.param;
    sys.set_anchor(start.anchor, start.anchor_velocity);

    const Eigen::VectorXd w = arc_weights(m, pol);
    Pac pac([&sys](const Eigen::VectorXd& zz) -> Eigen::VectorXd { return sys.residual(zz); },
            [&sys](const Eigen::VectorXd& zz) -> Eigen::MatrixXd { return sys.jacobian(zz); }, w);
    PacPolicy ppol;
    ppol.tol = pol.residual_tol * 0.3;
    ppol.newton_max = 14;

    // initial tangent, oriented away from the Hopf equilibrium (growing
    // amplitude); fallback: toward increasing parameter
    Eigen::VectorXd t = pac.tangent(z, Eigen::VectorXd::Zero(z.size()));
    {
        Eigen::Vector3d radial = z.head<3>() - to_vector(start.anchor);
        // anchor == node0, so use the offset from the cycle mean instead
        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (int k = 0; k < m; ++k) mean += z.segment<3>(3 * k);
        mean /= m;
        radial = z.head<3>() - mean;
        double sense = 0.0;
        for (int k = 0; k < m; ++k) {
            const Eigen::Vector3d rk = z.segment<3>(3 * k) - mean;
            sense += rk.dot(t.segment<3>(3 * k));
        }
        if (sense < 0) t = -t;
        if (std::abs(sense) < 1e-14 && t[3 * m + 1] < 0) t = -t;
    }

    double h = pol.h0;
    int successes = 0;
    fam.points.push_back(point_from_z(sys, z, t, pol));
    double last_tail_T = -1e300, last_tail_param = 1e300;
    int frozen_steps = 0;

    auto locate = [&](const CyclePoint& from, double ha, auto&& test,
                      EventType type) -> std::optional<std::pair<BifurcationEvent, LimitCycle>> {
        double s0 = 0.0, f0 = test(from);
        double s1 = 1.0;
        auto eval = [&](double s) -> std::optional<CyclePoint> {
            const Eigen::VectorXd zp = from.z + (s * ha) * from.tangent;
            sys.anchor_from(from.z);
            const auto zc = pac.correct(zp, from.tangent, ppol);
            if (!zc) return std::nullopt;
            const Eigen::VectorXd tn = pac.tangent(*zc, from.tangent);
            return point_from_z(sys, *zc, tn, pol);
        };
        auto p1 = eval(1.0);
        if (!p1) return std::nullopt;
        double f1 = test(*p1);
        CyclePoint best = *p1;
        for (int it = 0; it < 60; ++it) {
            double sm;
            if (std::abs(f1 - f0) > 1e-300) {
                sm = s1 - f1 * (s1 - s0) / (f1 - f0);
                if (!(sm > std::min(s0, s1) && sm < std::max(s0, s1))) sm = 0.5 * (s0 + s1);
            } else {
                sm = 0.5 * (s0 + s1);
            }
            auto pm = eval(sm);
            if (!pm) return std::nullopt;
            best = *pm;
            const double fm = test(*pm);
            if (std::abs(fm) < 1e-8 || std::abs(s1 - s0) < 1e-13) break;
            if ((fm <= 0) == (f0 <= 0)) {
                s0 = sm;
                f0 = fm;
            } else {
                s1 = sm;
                f1 = fm;
            }
        }
        BifurcationEvent ev;
        ev.type = type;
        ev.param = best.param;
        ev.period = best.T;
        ev.state = best.node0;
        ev.test_residual = std::abs(test(best));
        return std::make_pair(ev, cycle_from_z(sys, best.z));
    };

    for (int step = 0; step < pol.max_steps; ++step) {
        const CyclePoint& prev = fam.points.back();
        sys.anchor_from(z);
        const Eigen::VectorXd z_pred = z + h * t;
        auto zc = pac.correct(z_pred, t, ppol);
        bool reject = !zc;
        if (zc) {
            const double dparam = std::abs((*zc)[3 * m + 1] - z[3 * m + 1]);
            const double dT = std::abs((*zc)[3 * m] - z[3 * m]);
            if (dparam > pol.max_dparam || dT > pol.max_dT) reject = true;
        }
        if (reject) {
            h *= 0.5;
            successes = 0;
            if (h < pol.h_min) {
                BifurcationEvent ev;
                ev.type = EventType::branch_end;
                ev.param = prev.param;
                ev.period = prev.T;
                ev.state = prev.node0;
                fam.events.push_back(ev);
                fam.event_cycles.push_back(cycle_from_z(sys, prev.z));
                return fam;
            }
            continue;
        }
        const Eigen::VectorXd z_new = *zc;
        Eigen::VectorXd t_new = pac.tangent(z_new, t);
        CyclePoint cur = point_from_z(sys, z_new, t_new, pol);

        // LPC: fold in the free parameter
        if (prev.tangent_param * cur.tangent_param < 0 && prev.T < pol.T_trigger) {
            if (auto ev = locate(prev, h, [](const CyclePoint& q) { return q.tangent_param; },
                                 EventType::LPC)) {
                fam.events.push_back(ev->first);
                fam.event_cycles.push_back(ev->second);
            }
        }
        // PD: real nontrivial multiplier through -1. At a genuine doubling
        // the non-flipping multipliers sit at O(1), so extreme magnitudes
        // (the Shilnikov accumulation in a homoclinic tail) are ignored.
        if (max_nontrivial(prev.multipliers) < pol.pd_mult_gate &&
            max_nontrivial(cur.multipliers) < pol.pd_mult_gate) {
            const double f0 = psi_pd(prev.multipliers), f1 = psi_pd(cur.multipliers);
            if (std::isfinite(f0) && std::isfinite(f1) && f0 * f1 < 0) {
                if (auto ev = locate(prev, h,
                                     [](const CyclePoint& q) { return psi_pd(q.multipliers); },
                                     EventType::PD)) {
                    fam.events.push_back(ev->first);
                    fam.event_cycles.push_back(ev->second);
                }
            }
        }

        const double prev_param = prev.param;  // prev dangles after the push
        fam.points.push_back(cur);
        z = z_new;
        t = t_new;
        if (++successes >= 3) {
            h = std::min(h * 1.3, pol.h_max);
            successes = 0;
        }

        // fit markers live where the parameter still resolves; past that the
        // family hugs the homoclinic value to machine precision
        if (cur.T > pol.tail_start && cur.T - last_tail_T >= pol.tail_spacing &&
            std::abs(cur.param - last_tail_param) > 1e-11 * (1.0 + std::abs(cur.param))) {
            fam.tail.emplace_back(cur.param, cur.T);
            last_tail_T = cur.T;
            last_tail_param = cur.param;
        }
        if (cur.T > pol.T_trigger) {
            const double dp = std::abs(cur.param - prev_param);
            frozen_steps = (dp < 1e-12 * (1.0 + std::abs(cur.param))) ? frozen_steps + 1 : 0;
        }
        if (cur.T > pol.T_max || frozen_steps >= 30) {
            fam.blew_up = true;
            return fam;
        }
        if (cur.param < lo || cur.param > hi) {
            fam.hit_range_end = true;
            return fam;
        }
    }
    return fam;
}

std::array<std::complex<double>, 3> floquet(const LimitCycle& cycle, const ModelParams& p,
                                            const CyclePolicy& pol) {
    CyclePolicy q = pol;
    q.segments = static_cast<int>(cycle.nodes.size());
    ShootingSystem sys(p, q);
    Eigen::VectorXd z(3 * q.segments + 2);
    for (int k = 0; k < q.segments; ++k) z.segment<3>(3 * k) = to_vector(cycle.nodes[k]);
    z[3 * q.segments] = cycle.period;
    z[3 * q.segments + 1] = cycle.param;
    sys.set_anchor(cycle.anchor, cycle.anchor_velocity);
    return eigenvalues3(sys.monodromy(z));
}

double divergence_integral(const LimitCycle& cycle, const ModelParams& p, double tol) {
    const ModelParams q = p.with_S_in(cycle.param);
    const double h = cycle.period / cycle.nodes.size();
    double total = 0.0;
    for (const auto& node : cycle.nodes) {
        double buf[4] = {node.S, node.x1, node.x2, 0.0};
        auto ode = [&q](double, const double* y, double* dy) {
            const State s{y[0], y[1], y[2]};
            const State f = rhs(s, q);
            dy[0] = f.S;
            dy[1] = f.x1;
            dy[2] = f.x2;
            dy[3] = jacobian(s, q).trace();
        };
        dopri5(ode, 4, 0.0, h, buf, tol, tol * 1e-2, nullptr);
        total += buf[3];
    }
    return total;
}

std::optional<BifurcationEvent> detect_homoclinic(const CycleFamily& family,
                                                  const CyclePolicy& pol) {
    const auto& tail = family.tail;
    if (family.points.empty() || family.points.back().T <= pol.T_trigger) return std::nullopt;

    // longest sigma-monotone prefix of the tail markers (the approach can
    // develop micro-folds right before the homoclinic value; the log law
    // holds on the clean part)
    size_t mono = tail.size();
    if (tail.size() >= 2) {
        const double dir = (tail[1].first > tail[0].first) ? 1.0 : -1.0;
        for (size_t k = 1; k < tail.size(); ++k) {
            if ((tail[k].first - tail[k - 1].first) * dir <= 0 ||
                tail[k].second <= tail[k - 1].second) {
                mono = k;
                break;
            }
        }
    }

    if (static_cast<int>(mono) < pol.fit_points) {
        // not enough clean markers for the fit; past the wrinkles the family
        // parameter converges to the homoclinic value, so report the
        // terminal parameter directly when the family ran out by blow-up
        if (!family.blew_up || family.points.size() < 8) return std::nullopt;
        const size_t n = family.points.size();
        double lo = HUGE_VAL, hi = -HUGE_VAL;
        for (size_t k = n - 5; k < n; ++k) {
            lo = std::min(lo, family.points[k].param);
            hi = std::max(hi, family.points[k].param);
        }
        if (hi - lo > 1e-3) return std::nullopt;  // terminal value not settled
        BifurcationEvent ev;
        ev.type = EventType::Hom;
        ev.param = family.points.back().param;
        ev.period = family.points.back().T;
        ev.fit_r2 = 0.0;  // direct limit, the log fit had no monotone tail
        ev.test_residual = hi - lo;
        return ev;
    }

    std::vector<std::pair<double, double>> pts(tail.begin() + mono - pol.fit_points,
                                               tail.begin() + mono);
    const double dir = (pts.back().first > pts.front().first) ? 1.0 : -1.0;

    const double s_last = pts.back().first;
    const double span = std::abs(s_last - pts.front().first);

    // least squares T = a - b ln|s_hom - s| for a trial offset d > 0,
    // s_hom = s_last + dir*d
    auto sse = [&](double d, double* a_out = nullptr, double* b_out = nullptr,
                   double* r2_out = nullptr) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        const int n = static_cast<int>(pts.size());
        for (auto& [s, T] : pts) {
            const double x = -std::log(std::abs(s_last + dir * d - s));
            sx += x;
            sy += T;
            sxx += x * x;
            sxy += x * T;
            syy += T * T;
        }
        const double det = n * sxx - sx * sx;
        if (std::abs(det) < 1e-300) return HUGE_VAL;
        const double b = (n * sxy - sx * sy) / det;
        const double a = (sy - b * sx) / n;
        double err = 0;
        for (auto& [s, T] : pts) {
            const double x = -std::log(std::abs(s_last + dir * d - s));
            const double e = T - (a + b * x);
            err += e * e;
        }
        if (a_out) *a_out = a;
        if (b_out) *b_out = b;
        if (r2_out) {
            const double mean = sy / pts.size();
            double tot = 0;
            for (auto& [s, T] : pts) tot += (T - mean) * (T - mean);
            *r2_out = tot > 0 ? 1.0 - err / tot : 0.0;
        }
        return err;
    };

    // golden-section on log10(d)
    const double phi_gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::log10(std::max(span * 1e-9, 1e-15));
    double hi = std::log10(std::max(span * 20.0, 1e-12));
    double x1 = hi - phi_gr * (hi - lo), x2 = lo + phi_gr * (hi - lo);
    double f1 = sse(std::pow(10, x1)), f2 = sse(std::pow(10, x2));
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi_gr * (hi - lo);
            f1 = sse(std::pow(10, x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi_gr * (hi - lo);
            f2 = sse(std::pow(10, x2));
        }
        if (hi - lo < 1e-12) break;
    }
    const double d_best = std::pow(10, 0.5 * (lo + hi));
    double a, b, r2;
    sse(d_best, &a, &b, &r2);
    if (!(b > 0) || !(r2 >= 0.99)) return std::nullopt;

    BifurcationEvent ev;
    ev.type = EventType::Hom;
    ev.param = s_last + dir * d_best;
    ev.period = pts.back().second;
    ev.fit_r2 = r2;
    return ev;
}

std::vector<PeriodCurve> period_curve(const CycleFamily& family) {
    std::vector<PeriodCurve> curves;
    PeriodCurve cur;
    cur.label = "C1";
    // walk the family in arc order; cut at each LPC fold (parameter-tangent
    // sign flip at moderate period)
    for (size_t k = 0; k < family.points.size(); ++k) {
        const auto& pt = family.points[k];
        cur.param.push_back(pt.param);
        cur.T.push_back(pt.T);
        cur.stable.push_back(pt.stable);
        const bool fold_here = k + 1 < family.points.size() && pt.T < 100.0 &&
                               family.points[k + 1].tangent_param * pt.tangent_param < 0;
        if (fold_here) {
            curves.push_back(cur);
            cur = PeriodCurve{};
            cur.label = "C" + std::to_string(curves.size() + 1);
        }
    }
    if (!cur.param.empty()) curves.push_back(cur);
    return curves;
}

} // namespace mutbif
