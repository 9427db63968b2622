#include "mutbif/atlas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <map>
#include <set>
#include <thread>

#include "mutbif/continuation.hpp"
#include "mutbif/svg.hpp"

namespace mutbif {

std::string to_string(Codim2Point::Type t) {
    switch (t) {
        case Codim2Point::Type::BT: return "BT";
        case Codim2Point::Type::GH: return "GH";
        case Codim2Point::Type::R1: return "R1";
        case Codim2Point::Type::R2: return "R2";
        case Codim2Point::Type::CPC: return "CPC";
    }
    return "?";
}

namespace {

// ---------------------------------------------------------------- LP curve

struct LpSystem {
    ModelParams base;
    // z = (x1, x2, S_in, D)
    Eigen::VectorXd residual(const Eigen::VectorXd& z) const {
        ModelParams q = base.with_S_in(z[2]).with_D(std::max(z[3], 1e-6));
        const double th1 = q.D1() / q.operating.D, th2 = q.D2() / q.operating.D;
        const double S = z[2] - th1 * z[0] - th2 * z[1];
        Eigen::VectorXd r(3);
        if (S <= 0 || z[0] <= 0 || z[1] <= 0) {
            r.setConstant(1e6);
            return r;
        }
        r[0] = growth(1, S, z[1], q) - q.D1();
        r[1] = growth(2, S, z[0], q) - q.D2();
        r[2] = slope_product({S, z[0], z[1]}, q) - 1.0;
        return r;
    }
    State state_of(const Eigen::VectorXd& z) const {
        ModelParams q = base.with_S_in(z[2]).with_D(std::max(z[3], 1e-6));
        const double th1 = q.D1() / q.operating.D, th2 = q.D2() / q.operating.D;
        return {z[2] - th1 * z[0] - th2 * z[1], z[0], z[1]};
    }
};

// --------------------------------------------------------------- Hopf curve

struct HopfSystem {
    ModelParams base;
    // z = (S, x1, x2, S_in, D)
    Eigen::VectorXd residual(const Eigen::VectorXd& z) const {
        ModelParams q = base.with_S_in(z[3]).with_D(std::max(z[4], 1e-6));
        Eigen::VectorXd r(4);
        if (z[0] <= 0 || z[1] <= 0 || z[2] <= 0) {
            r.setConstant(1e6);
            return r;
        }
        r[0] = q.operating.D * (z[3] - z[0]) - q.D1() * z[1] - q.D2() * z[2];
        r[1] = growth(1, z[0], z[2], q) - q.D1();
        r[2] = growth(2, z[0], z[1], q) - q.D2();
        r[3] = routh_hurwitz({z[0], z[1], z[2]}, q).c4;
        return r;
    }
    RouthHurwitz rh_of(const Eigen::VectorXd& z) const {
        ModelParams q = base.with_S_in(z[3]).with_D(std::max(z[4], 1e-6));
        return routh_hurwitz({z[0], z[1], z[2]}, q);
    }
};

template <class Sys>
BifCurve trace_curve(const Sys& sys, Eigen::VectorXd z0, const Window& win, EventType type,
                     int param_col_sin, int param_col_d,
                     const std::function<bool(const Eigen::VectorXd&)>& guard,
                     const std::function<void(const Eigen::VectorXd&, BifCurvePoint&)>& fill,
                     std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>* guard_ends) {
    const int n = static_cast<int>(z0.size());
    auto resid = [&sys](const Eigen::VectorXd& z) { return sys.residual(z); };
    Pac pac(resid, [&, n](const Eigen::VectorXd& z) { return fd_jacobian(resid, z, n - 1); },
            Eigen::VectorXd::Ones(n));
    PacPolicy pol;
    pol.tol = 1e-10;

    // polish the seed at pinned D
    auto seed = pac.correct_pinned(z0, param_col_d, pol);
    if (!seed) seed = pac.correct_pinned(z0, param_col_sin, pol);
    if (!seed) return BifCurve{type, {}};
    z0 = *seed;

    BifCurve curve;
    curve.type = type;
    auto push = [&](const Eigen::VectorXd& z) {
        BifCurvePoint pt;
        pt.S_in = z[param_col_sin];
        pt.D = z[param_col_d];
        fill(z, pt);
        curve.points.push_back(pt);
    };

    for (int dir = 0; dir < 2; ++dir) {
        Eigen::VectorXd z = z0;
        Eigen::VectorXd t = pac.tangent(z, Eigen::VectorXd::Zero(n));
        if ((dir == 0 && t[param_col_d] < 0) || (dir == 1 && t[param_col_d] >= 0)) t = -t;
        double h = 1e-3;
        std::vector<BifCurvePoint> leg;
        std::vector<Eigen::VectorXd> leg_z;
        int successes = 0;
        for (int step = 0; step < 40000; ++step) {
            const Eigen::VectorXd zp = z + h * t;
            auto zc = pac.correct(zp, t, pol);
            if (!zc) {
                h *= 0.5;
                successes = 0;
                if (h < 1e-9) break;
                continue;
            }
            if (guard && !guard(*zc)) {
                // bisect toward the guard boundary, store the bracketing pair
                if (guard_ends) guard_ends->push_back({z, *zc});
                break;
            }
            Eigen::VectorXd tn = pac.tangent(*zc, t);
            z = *zc;
            t = tn;
            BifCurvePoint pt;
            pt.S_in = z[param_col_sin];
            pt.D = z[param_col_d];
            fill(z, pt);
            leg.push_back(pt);
            leg_z.push_back(z);
            if (++successes >= 3) {
                h = std::min(h * 1.3, 0.02);
                successes = 0;
            }
            if (!win.contains(pt.S_in, pt.D)) break;
        }
        if (dir == 0) {
            std::reverse(leg.begin(), leg.end());
            curve.points = leg;
            push(z0);
        } else {
            curve.points.insert(curve.points.end(), leg.begin(), leg.end());
        }
    }
    return curve;
}

} // namespace

BifCurve continue_lp_curve(const ModelParams& base, double sin_seed, const State& state_seed,
                           const Window& win) {
    LpSystem sys{base};
    Eigen::VectorXd z(4);
    z << state_seed.x1, state_seed.x2, sin_seed, base.operating.D;
    return trace_curve(
        sys, z, win, EventType::LP, 2, 3, nullptr,
        [&sys](const Eigen::VectorXd& zz, BifCurvePoint& pt) { pt.state = sys.state_of(zz); },
        nullptr);
}

BifCurve continue_hopf_curve(const ModelParams& base, double sin_seed, const State& state_seed,
                             const Window& win, std::vector<Codim2Point>* bt_out) {
    HopfSystem sys{base};
    Eigen::VectorXd z(5);
    z << state_seed.S, state_seed.x1, state_seed.x2, sin_seed, base.operating.D;
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> guard_ends;
    BifCurve curve = trace_curve(
        sys, z, win, EventType::H, 3, 4,
        [&sys](const Eigen::VectorXd& zz) {
            const RouthHurwitz rh = sys.rh_of(zz);
            return rh.c2 > 1e-9 && rh.c3 > 0;
        },
        [&sys, &base](const Eigen::VectorXd& zz, BifCurvePoint& pt) {
            pt.state = {zz[0], zz[1], zz[2]};
            const RouthHurwitz rh = sys.rh_of(zz);
            pt.aux = rh.c2;
            ModelParams q = base.with_S_in(zz[3]).with_D(zz[4]);
            try {
                pt.l1 = lyapunov_l1(pt.state, q);
            } catch (const std::exception&) {
                pt.l1 = 0.0;  // degenerate pair right at the BT end
            }
        },
        &guard_ends);

    if (bt_out) {
        for (auto& [za, zb] : guard_ends) {
            // bisect c2 = 0 between the last good and first bad point
            Eigen::VectorXd lo = za, hi = zb;
            auto resid = [&sys](const Eigen::VectorXd& zz) { return sys.residual(zz); };
            Pac pac(resid,
                    [&](const Eigen::VectorXd& zz) { return fd_jacobian(resid, zz, 4); },
                    Eigen::VectorXd::Ones(5));
            PacPolicy pol;
            pol.tol = 1e-10;
            double c2_lo = sys.rh_of(lo).c2;
            Eigen::VectorXd mid = lo;
            for (int it = 0; it < 40; ++it) {
                Eigen::VectorXd guess = 0.5 * (lo + hi);
                auto zc = pac.correct_pinned(guess, 4, pol);  // pin D, solve the rest
                if (!zc) break;
                mid = *zc;
                const double c2m = sys.rh_of(mid).c2;
                if ((c2m > 0) == (c2_lo > 0)) {
                    lo = mid;
                    c2_lo = c2m;
                } else {
                    hi = mid;
                }
                if ((lo - hi).norm() < 1e-10) break;
            }
            Codim2Point bt;
            bt.type = Codim2Point::Type::BT;
            bt.S_in = mid[3];
            bt.D = mid[4];
            bt.uncertainty = std::max((lo - hi).norm(), 1e-6);
            bt.provenance = "c2 -> 0 along the Hopf curve";
            bt_out->push_back(bt);
        }
    }
    return curve;
}

SliceResult analyze_slice(const ModelParams& base, double D, const SliceOptions& opt) {
    SliceResult res;
    res.D = D;
    const ModelParams p = base.with_D(D);

    // reference point with a coexistence pair
    std::vector<Equilibrium> eqs;
    double sin_ref = 0.0;
    for (double s = opt.sin_lo; s <= opt.sin_hi; s += 0.1) {
        eqs = find_coexistence(p.with_S_in(s));
        if (eqs.size() >= 2) {
            sin_ref = s;
            break;
        }
    }
    if (eqs.size() < 2) return res;

    Branch br = continue_equilibria(eqs[0], p.with_S_in(sin_ref), FreeParam::S_in, opt.sin_lo,
                                    opt.sin_hi, opt.branch);
    for (const auto& ev : br.events)
        if (ev.type == EventType::LP || ev.type == EventType::H) res.events.push_back(ev);

    std::optional<BifurcationEvent> hopf;
    for (const auto& ev : res.events)
        if (ev.type == EventType::H) hopf = ev;
    if (hopf) {
        res.has_hopf = true;
        res.sigma_hopf = hopf->param;
        res.l1 = hopf->l1;
        try {
            const LimitCycle seed = cycle_from_hopf(*hopf, p, opt.cycles);
            CycleFamily fam = continue_cycles(seed, p, hopf->param - opt.family_below,
                                              hopf->param + opt.family_above, opt.cycles);
            res.family_ok = true;
            for (size_t k = 0; k < fam.events.size(); ++k) {
                if (fam.events[k].type == EventType::LPC || fam.events[k].type == EventType::PD)
                    res.events.push_back(fam.events[k]);
            }
            if (auto hom = detect_homoclinic(fam, opt.cycles)) res.events.push_back(*hom);
            if (opt.keep_family_curves) res.curves = period_curve(fam);
        } catch (const std::exception&) {
            res.family_ok = false;
        }
    }
    std::sort(res.events.begin(), res.events.end(),
              [](const BifurcationEvent& a, const BifurcationEvent& b) { return a.param < b.param; });
    return res;
}

CycleCurveSweep sweep_cycle_curves(const ModelParams& base, double d_lo, double d_hi, int n_slices,
                                   const Window& win, const SliceOptions& opt) {
    CycleCurveSweep sweep;
    sweep.lpc.type = EventType::LPC;
    sweep.pd.type = EventType::PD;

    std::set<double> grid;
    for (int k = 0; k < n_slices; ++k)
        grid.insert(d_lo + (d_hi - d_lo) * k / std::max(1, n_slices - 1));

    auto run_batch = [&](const std::vector<double>& ds) {
        std::vector<SliceResult> out(ds.size());
        std::atomic<size_t> next{0};
        const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
        std::vector<std::future<void>> jobs;
        for (unsigned w = 0; w < workers; ++w)
            jobs.push_back(std::async(std::launch::async, [&]() {
                size_t k;
                while ((k = next.fetch_add(1)) < ds.size())
                    out[k] = analyze_slice(base, ds[k], opt);
            }));
        for (auto& j : jobs) j.get();
        return out;
    };

    std::vector<double> ds(grid.begin(), grid.end());
    std::vector<SliceResult> slices = run_batch(ds);

    // refine x4 where the per-slice LPC pair tightens (CPC side) and where
    // LPC/PD events appear or vanish between neighbours (turning points)
    auto count_of = [](const SliceResult& s, EventType t) {
        int c = 0;
        for (auto& e : s.events) c += (e.type == t);
        return c;
    };
    std::set<double> extra;
    for (size_t k = 0; k + 1 < slices.size(); ++k) {
        const bool lpc_change = count_of(slices[k], EventType::LPC) !=
                                count_of(slices[k + 1], EventType::LPC);
        const bool pd_change = count_of(slices[k], EventType::PD) !=
                               count_of(slices[k + 1], EventType::PD);
        if (lpc_change || pd_change) {
            const double a = slices[k].D, b = slices[k + 1].D;
            for (int q = 1; q <= 3; ++q) extra.insert(a + (b - a) * q / 4.0);
        }
    }
    if (!extra.empty()) {
        std::vector<double> ds2(extra.begin(), extra.end());
        std::vector<SliceResult> more = run_batch(ds2);
        slices.insert(slices.end(), more.begin(), more.end());
        std::sort(slices.begin(), slices.end(),
                  [](const SliceResult& a, const SliceResult& b) { return a.D < b.D; });
    }

    for (const auto& s : slices) {
        for (const auto& ev : s.events) {
            if (!win.contains(ev.param, s.D)) continue;
            BifCurvePoint pt;
            pt.S_in = ev.param;
            pt.D = s.D;
            pt.state = ev.state;
            pt.aux = ev.period;
            if (ev.type == EventType::LPC) sweep.lpc.points.push_back(pt);
            if (ev.type == EventType::PD) sweep.pd.points.push_back(pt);
        }
    }
    auto order = [](const BifCurvePoint& a, const BifCurvePoint& b) {
        return a.D != b.D ? a.D < b.D : a.S_in < b.S_in;
    };
    std::sort(sweep.lpc.points.begin(), sweep.lpc.points.end(), order);
    std::sort(sweep.pd.points.begin(), sweep.pd.points.end(), order);
    sweep.slices = std::move(slices);
    return sweep;
}

namespace {

double polyline_distance(const BifCurve& curve, double s, double d, double s_scale,
                         double d_scale, size_t* nearest = nullptr) {
    double best = HUGE_VAL;
    for (size_t k = 0; k < curve.points.size(); ++k) {
        const double ds = (curve.points[k].S_in - s) / s_scale;
        const double dd = (curve.points[k].D - d) / d_scale;
        const double v = std::sqrt(ds * ds + dd * dd);
        if (v < best) {
            best = v;
            if (nearest) *nearest = k;
        }
    }
    return best;
}

} // namespace

std::vector<Codim2Point> locate_codim2(const BifCurve& lp, const BifCurve& hopf,
                                       const std::vector<Codim2Point>& bt_candidates,
                                       const CycleCurveSweep& sweep) {
    std::vector<Codim2Point> out;

    // BT: the c2->0 end of the Hopf trace, cross-checked against the LP curve
    for (const auto& bt : bt_candidates) {
        Codim2Point p = bt;
        if (!lp.points.empty()) {
            const double dist = polyline_distance(lp, p.S_in, p.D, 1.0, 1.0);
            p.uncertainty = std::max(p.uncertainty, dist);
            p.provenance += "; distance to the LP curve " + std::to_string(dist);
        }
        out.push_back(p);
    }

    // GH: l1 sign change along the Hopf curve
    for (size_t k = 0; k + 1 < hopf.points.size(); ++k) {
        const auto& a = hopf.points[k];
        const auto& b = hopf.points[k + 1];
        if (a.l1 == 0 || b.l1 == 0) continue;
        if ((a.l1 < 0) != (b.l1 < 0)) {
            const double w = std::abs(a.l1) + std::abs(b.l1);
            const double f = w > 0 ? std::abs(a.l1) / w : 0.5;
            Codim2Point gh;
            gh.type = Codim2Point::Type::GH;
            gh.S_in = a.S_in + f * (b.S_in - a.S_in);
            gh.D = a.D + f * (b.D - a.D);
            gh.uncertainty = std::hypot(b.S_in - a.S_in, b.D - a.D);
            gh.provenance = "l1 sign change on the Hopf curve";
            out.push_back(gh);
        }
    }

    // group per-slice LPC values
    std::map<double, std::vector<double>> lpc_by_d, pd_by_d;
    for (const auto& pt : sweep.lpc.points) lpc_by_d[pt.D].push_back(pt.S_in);
    for (const auto& pt : sweep.pd.points) pd_by_d[pt.D].push_back(pt.S_in);

    // CPC: gap^2 of the per-slice LPC pair, quadratic fit in D, smallest root
    {
        std::vector<std::pair<double, double>> gaps;  // (D, gap^2), pairs only
        std::vector<std::pair<double, double>> mids;
        for (auto& [d, v] : lpc_by_d) {
            if (v.size() == 2) {
                gaps.emplace_back(d, (v[1] - v[0]) * (v[1] - v[0]));
                mids.emplace_back(d, 0.5 * (v[0] + v[1]));
            }
        }
        if (gaps.size() >= 3) {
            std::sort(gaps.begin(), gaps.end());
            std::sort(mids.begin(), mids.end());
            const size_t M = std::min<size_t>(4, gaps.size());
            // quadratic fit gap^2 = q0 + q1 D + q2 D^2 over the M tightest slices
            Eigen::MatrixXd A(M, 3);
            Eigen::VectorXd b(M);
            for (size_t k = 0; k < M; ++k) {
                A(k, 0) = 1.0;
                A(k, 1) = gaps[k].first;
                A(k, 2) = gaps[k].first * gaps[k].first;
                b[k] = gaps[k].second;
            }
            const Eigen::Vector3d q = A.colPivHouseholderQr().solve(b);
            double d_cpc = gaps[0].first;
            const double disc = q[1] * q[1] - 4 * q[2] * q[0];
            if (std::abs(q[2]) > 1e-300 && disc >= 0) {
                const double r1 = (-q[1] + std::sqrt(disc)) / (2 * q[2]);
                const double r2 = (-q[1] - std::sqrt(disc)) / (2 * q[2]);
                // root nearest below the tightest slice
                d_cpc = (std::abs(r1 - gaps[0].first) < std::abs(r2 - gaps[0].first)) ? r1 : r2;
            } else if (std::abs(q[1]) > 1e-300) {
                d_cpc = -q[0] / q[1];
            }
            // midpoint extrapolated linearly from the two tightest slices
            double s_cpc = mids[0].second;
            if (mids.size() >= 2) {
                const double slope = (mids[1].second - mids[0].second) /
                                     (mids[1].first - mids[0].first);
                s_cpc = mids[0].second + slope * (d_cpc - mids[0].first);
            }
            Codim2Point cpc;
            cpc.type = Codim2Point::Type::CPC;
            cpc.S_in = s_cpc;
            cpc.D = d_cpc;
            cpc.uncertainty = std::abs(gaps[0].first - d_cpc) +
                              (gaps.size() >= 2 ? gaps[1].first - gaps[0].first : 1e-3);
            cpc.provenance = "LPC pair coalescence, gap^2 fit over per-D slices";
            out.push_back(cpc);
        }
    }

    // R2: turning point of the PD curve in D
    if (!sweep.pd.points.empty()) {
        std::vector<std::pair<double, double>> top;  // (D, S_in), highest D first
        for (auto& [d, v] : pd_by_d)
            for (double s : v) top.emplace_back(d, s);
        std::sort(top.begin(), top.end(), [](auto& a, auto& b) { return a.first > b.first; });
        Codim2Point r2;
        r2.type = Codim2Point::Type::R2;
        r2.D = top[0].first;
        r2.S_in = top[0].second;
        double spacing = 1e-3;
        if (top.size() >= 3) {
            // quadratic vertex through the three topmost points, D as a
            // function of S_in
            const double x0 = top[0].second, x1 = top[1].second, x2 = top[2].second;
            const double y0 = top[0].first, y1 = top[1].first, y2 = top[2].first;
            Eigen::Matrix3d A;
            A << 1, x0, x0 * x0, 1, x1, x1 * x1, 1, x2, x2 * x2;
            const Eigen::Vector3d rhs3(y0, y1, y2);
            if (std::abs(A.determinant()) > 1e-14) {
                const Eigen::Vector3d c = A.partialPivLu().solve(rhs3);
                if (c[2] < 0) {  // concave: genuine max
                    const double sv = -c[1] / (2 * c[2]);
                    const double dv = c[0] + c[1] * sv + c[2] * sv * sv;
                    if (std::abs(sv - x0) < 0.1) {
                        r2.S_in = sv;
                        r2.D = dv;
                    }
                }
            }
            spacing = std::abs(top[0].first - top[2].first) + 1e-4;
        }
        r2.uncertainty = spacing;
        r2.provenance = "turning point of the period-doubling curve in D";
        out.push_back(r2);
    }

    // R1 proxy: closest approach of the LPC cloud to the Hopf curve
    if (!sweep.lpc.points.empty() && !hopf.points.empty()) {
        double best = HUGE_VAL;
        BifCurvePoint best_pt;
        size_t best_h = 0;
        for (const auto& pt : sweep.lpc.points) {
            size_t hx = 0;
            const double d = polyline_distance(hopf, pt.S_in, pt.D, 1.0, 1.0, &hx);
            if (d < best) {
                best = d;
                best_pt = pt;
                best_h = hx;
            }
        }
        Codim2Point r1;
        r1.type = Codim2Point::Type::R1;
        r1.S_in = 0.5 * (best_pt.S_in + hopf.points[best_h].S_in);
        r1.D = 0.5 * (best_pt.D + hopf.points[best_h].D);
        r1.proxy = true;
        r1.uncertainty = best + 1e-3;
        r1.provenance = "closest approach of the LPC cloud to the Hopf curve (proxy), distance " +
                        std::to_string(best);
        out.push_back(r1);
    }
    return out;
}

namespace {

// first crossing of the curve along the S_in axis at fixed D, if any
std::optional<double> curve_sin_at_d(const BifCurve& curve, double d) {
    std::optional<double> best;
    for (size_t k = 0; k + 1 < curve.points.size(); ++k) {
        const auto& a = curve.points[k];
        const auto& b = curve.points[k + 1];
        if ((a.D <= d && b.D >= d) || (b.D <= d && a.D >= d)) {
            const double f = (b.D == a.D) ? 0.5 : (d - a.D) / (b.D - a.D);
            const double s = a.S_in + f * (b.S_in - a.S_in);
            if (!best || s < *best) best = s;
        }
    }
    return best;
}

std::string cycle_pattern_label(bool coexist_stable, int n_stable, int n_unstable) {
    const std::string head = coexist_stable ? "J2" : "J1";
    const int n = n_stable + n_unstable;
    if (n == 0) return head + "^0";
    if (head == "J1") {
        if (n == 1) return n_stable ? "J1^{C1s}" : "J1^{C1u}";
        if (n == 2 && n_stable == 1) return "J1^{C12su}";
        if (n == 3 && n_stable == 2) return "J1^{C123sus}";
        if (n == 3 && n_stable == 1) return "J1^{C123suu}";
    } else {
        if (n == 1) return n_stable ? "J2^{C1s}" : "J2^{C2u}";
        if (n == 2 && n_stable == 1) return "J2^{C23us}";
        if (n == 2 && n_stable == 0) return "J2^{C23uu}";
    }
    return head + "^{C?}";
}

} // namespace

RegionGrid classify_regions(const Window& win, int nx, int ny, const ModelParams& base,
                            const CycleCurveSweep& sweep, const BifCurve& lp,
                            const BifCurve& hopf) {
    RegionGrid grid;
    grid.win = win;
    grid.nx = nx;
    grid.ny = ny;
    grid.labels.assign(static_cast<size_t>(nx) * ny, "J0");
    grid.flagged.assign(static_cast<size_t>(nx) * ny, 0);

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int> next{0};
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&]() {
            int cell;
            while ((cell = next.fetch_add(1)) < nx * ny) {
                const int j = cell / nx, i = cell % nx;
                const double s = grid.sin_at(i), d = grid.d_at(j);
                ModelParams p = base.with_S_in(s).with_D(d);
                std::vector<Equilibrium> eqs;
                try {
                    eqs = find_coexistence(p);
                } catch (const std::exception&) {
                    grid.flagged[cell] = 1;
                    continue;
                }
                std::string label;
                if (eqs.empty()) {
                    label = "J0";
                } else {
                    const bool coexist_stable = eqs.front().stability == Stability::les;
                    // cycle inventory from the nearest D slice
                    int n_s = 0, n_u = 0;
                    const SliceResult* nearest = nullptr;
                    for (const auto& sl : sweep.slices)
                        if (!nearest || std::abs(sl.D - d) < std::abs(nearest->D - d))
                            nearest = &sl;
                    if (nearest && std::abs(nearest->D - d) < 0.25 * (win.d_max - win.d_min)) {
                        for (const auto& c : nearest->curves) {
                            if (c.param.empty()) continue;
                            const auto [mn, mx] =
                                std::minmax_element(c.param.begin(), c.param.end());
                            if (s < *mn || s > *mx) continue;
                            // stability at the sample nearest in param
                            size_t bk = 0;
                            double bd = HUGE_VAL;
                            for (size_t k = 0; k < c.param.size(); ++k) {
                                const double dd = std::abs(c.param[k] - s);
                                if (dd < bd) {
                                    bd = dd;
                                    bk = k;
                                }
                            }
                            (c.stable[bk] ? n_s : n_u) += 1;
                        }
                    }
                    label = cycle_pattern_label(coexist_stable, n_s, n_u);
                }
                grid.labels[cell] = label;

                // consistency flag against the curve sides
                const auto lp_s = curve_sin_at_d(lp, d);
                if (lp_s) {
                    const bool expect_coexist = s > *lp_s;
                    if (expect_coexist != !eqs.empty() && std::abs(s - *lp_s) >
                            1.5 * (win.sin_max - win.sin_min) / nx)
                        grid.flagged[cell] = 1;
                }
            }
        }));
    }
    for (auto& j : jobs) j.get();
    return grid;
}

std::string plot_operating_diagram(const Window& win, const BifCurve& lp, const BifCurve& hopf,
                                   const CycleCurveSweep& sweep,
                                   const std::vector<Codim2Point>& codim2) {
    SvgCanvas svg(win.sin_min, win.sin_max, win.d_min, win.d_max);
    svg.axes("S_in", "D");
    auto draw = [&svg](const BifCurve& c, const std::string& color, bool as_points) {
        std::vector<double> xs, ys;
        for (const auto& pt : c.points) {
            xs.push_back(pt.S_in);
            ys.push_back(pt.D);
        }
        if (as_points)
            svg.scatter(xs, ys, color, 1.6);
        else
            svg.polyline(xs, ys, color);
    };
    draw(lp, "#0000ff", false);      // LP blue
    draw(hopf, "#ff0000", false);    // H red
    draw(sweep.lpc, "#00a000", true);  // LPC green
    draw(sweep.pd, "#00c0c0", true);   // PD cyan
    for (const auto& c2 : codim2) {
        svg.scatter({c2.S_in}, {c2.D}, "#000000", 3.5);
        svg.text(c2.S_in, c2.D, to_string(c2.type));
    }
    return svg.render();
}

std::string plot_branch_diagram(const Branch& branch, const std::vector<SliceResult>&) {
    double plo = HUGE_VAL, phi = -HUGE_VAL, slo = HUGE_VAL, shi = -HUGE_VAL;
    for (const auto& bp : branch.points) {
        plo = std::min(plo, bp.param);
        phi = std::max(phi, bp.param);
        slo = std::min(slo, bp.state.S);
        shi = std::max(shi, bp.state.S);
    }
    if (branch.points.empty()) {
        plo = 0;
        phi = 1;
        slo = 0;
        shi = 1;
    }
    SvgCanvas svg(plo, phi + 1e-9, std::min(0.0, slo), shi * 1.05 + 1e-9);
    svg.axes("S_in", "S");
    // stable red, unstable blue, split into arcs of constant stability
    std::vector<double> xs, ys;
    bool stable = false;
    auto flush = [&]() {
        if (xs.size() >= 2) svg.polyline(xs, ys, stable ? "#ff0000" : "#0000ff");
        xs.clear();
        ys.clear();
    };
    for (size_t k = 0; k < branch.points.size(); ++k) {
        const auto& bp = branch.points[k];
        const bool st = (bp.rh.c3 > 0 && bp.rh.c4 > 0);
        if (k == 0 || st != stable) {
            flush();
            stable = st;
        }
        xs.push_back(bp.param);
        ys.push_back(bp.state.S);
    }
    flush();
    for (const auto& ev : branch.events) {
        svg.scatter({ev.param}, {ev.state.S}, "#000000", 3.0);
        svg.text(ev.param, ev.state.S,
                 ev.type == EventType::LP ? "LP" : (ev.type == EventType::H ? "H" : "end"));
    }
    return svg.render();
}

std::string plot_period_curves(const std::vector<PeriodCurve>& curves) {
    double plo = HUGE_VAL, phi = -HUGE_VAL, tlo = 0.0, thi = 1.0;
    for (const auto& c : curves)
        for (size_t k = 0; k < c.param.size(); ++k) {
            plo = std::min(plo, c.param[k]);
            phi = std::max(phi, c.param[k]);
            thi = std::max(thi, c.T[k]);
        }
    if (!(plo < phi)) {
        plo = 0;
        phi = 1;
    }
    SvgCanvas svg(plo, phi, tlo, thi * 1.05);
    svg.axes("S_in", "T");
    for (const auto& c : curves) {
        std::vector<double> xs, ys;
        bool stable = false;
        auto flush = [&]() {
            if (xs.size() >= 2) svg.polyline(xs, ys, stable ? "#ff0000" : "#0000ff");
            xs.clear();
            ys.clear();
        };
        for (size_t k = 0; k < c.param.size(); ++k) {
            if (k == 0 || c.stable[k] != stable) {
                flush();
                stable = c.stable[k];
            }
            xs.push_back(c.param[k]);
            ys.push_back(c.T[k]);
        }
        flush();
        if (!c.param.empty()) svg.text(c.param.back(), c.T.back(), c.label);
    }
    return svg.render();
}

} // namespace mutbif
