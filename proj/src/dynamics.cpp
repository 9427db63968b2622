#include "mutbif/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

namespace mutbif {

namespace {

struct ModelOde {
    const ModelParams& p;
    void operator()(double, const double* y, double* dy) const {
        const State s{std::max(y[0], 0.0), std::max(y[1], 0.0), std::max(y[2], 0.0)};
        const State v = rhs(s, p);
        dy[0] = v.S;
        dy[1] = v.x1;
        dy[2] = v.x2;
    }
};

void clip_negative(double* y) {
    for (int i = 0; i < 3; ++i)
        if (y[i] < 0.0 && y[i] >= -1e-12) y[i] = 0.0;
}

double vel_norm(const State& s, const ModelParams& p) {
    const State v = rhs(s, p);
    return std::sqrt(v.S * v.S + v.x1 * v.x1 + v.x2 * v.x2);
}

} // namespace

Trajectory integrate(const State& init, const ModelParams& p, double t_end, double tol,
                     double sample_dt) {
    p.validate();
    if (init.S < 0 || init.x1 < 0 || init.x2 < 0)
        throw std::domain_error("integrate: negative initial state");
    if (!(tol > 0)) throw std::domain_error("integrate: tol must be positive");

    Trajectory traj;
    double y[3] = {init.S, init.x1, init.x2};
    traj.t.push_back(0.0);
    traj.y.push_back(init);
    double next_sample = sample_dt;

    ModelOde ode{p};
    dopri5(ode, 3, 0.0, t_end, y, tol, tol * 1e-2, &traj.stats,
           [&](double, double t_new, double* yy, const DenseSegment& dense) {
               clip_negative(yy);
               if (sample_dt > 0) {
                   double buf[3];
                   while (next_sample <= t_new + 1e-14 && next_sample <= t_end) {
                       dense.eval(std::min(next_sample, t_new), buf);
                       clip_negative(buf);
                       traj.t.push_back(next_sample);
                       traj.y.push_back({buf[0], buf[1], buf[2]});
                       next_sample += sample_dt;
                   }
               } else {
                   traj.t.push_back(t_new);
                   traj.y.push_back({yy[0], yy[1], yy[2]});
               }
               return true;
           });
    return traj;
}

AttractorLabel classify_attractor(const State& init, const ModelParams& p, double budget,
                                  const std::vector<Equilibrium>& known, double tol) {
    constexpr double kVelTol = 1e-9;
    constexpr double kEqDist = 1e-5;
    constexpr double kCycleMatch = 1e-5;
    const double chunk = 80.0;

    AttractorLabel lab;
    double y[3] = {init.S, init.x1, init.x2};
    double t = 0.0;
    ModelOde ode{p};

    // trailing chunk statistics feeding the next chunk's section
    bool have_section = false;
    double sec_a[3], sec_n[3];

    struct Crossing {
        double t;
        State s;
    };
    std::vector<Crossing> crossings;

    while (t < budget) {
        const double t_next = std::min(budget, t + chunk);
        double mean[3] = {0, 0, 0};
        long count = 0;
        double closest[3];
        double best = HUGE_VAL;
        bool settled = false;

        double s_prev = have_section
                            ? (y[0] - sec_a[0]) * sec_n[0] + (y[1] - sec_a[1]) * sec_n[1] +
                                  (y[2] - sec_a[2]) * sec_n[2]
                            : 0.0;

        t = dopri5(ode, 3, t, t_next, y, tol, tol * 1e-2, nullptr,
                   [&](double t_old, double t_new, double* yy, const DenseSegment& dense) {
                       clip_negative(yy);
                       for (int i = 0; i < 3; ++i) mean[i] += yy[i];
                       ++count;

                       const State cur{yy[0], yy[1], yy[2]};
                       if (vel_norm(cur, p) < 1e-6) {
                           for (size_t k = 0; k < known.size(); ++k) {
                               if (distance(cur, known[k].state) < kEqDist) {
                                   // re-check the thresholds on a short
                                   // tight-tolerance segment: the coarse
                                   // integration jitters above 1e-9
                                   double v[3] = {cur.S, cur.x1, cur.x2};
                                   dopri5(ode, 3, 0.0, 5.0, v, 1e-12, 1e-14, nullptr);
                                   const State fine{v[0], v[1], v[2]};
                                   if (vel_norm(fine, p) < kVelTol &&
                                       distance(fine, known[k].state) < kEqDist) {
                                       lab.kind = AttractorLabel::Kind::equilibrium;
                                       lab.equilibrium_index = static_cast<int>(k);
                                       lab.reference = fine;
                                       lab.transient_time = t_new;
                                       settled = true;
                                       return false;
                                   }
                               }
                           }
                       }

                       if (have_section) {
                           const double s_new = (yy[0] - sec_a[0]) * sec_n[0] +
                                                (yy[1] - sec_a[1]) * sec_n[1] +
                                                (yy[2] - sec_a[2]) * sec_n[2];
                           if (s_prev < 0.0 && s_new >= 0.0) {
                               double lo = t_old, hi = t_new, buf[3];
                               for (int it = 0; it < 60; ++it) {
                                   const double mid = 0.5 * (lo + hi);
                                   dense.eval(mid, buf);
                                   const double sm = (buf[0] - sec_a[0]) * sec_n[0] +
                                                     (buf[1] - sec_a[1]) * sec_n[1] +
                                                     (buf[2] - sec_a[2]) * sec_n[2];
                                   (sm < 0 ? lo : hi) = mid;
                               }
                               dense.eval(hi, buf);
                               crossings.push_back({hi, {buf[0], buf[1], buf[2]}});
                           }
                           s_prev = s_new;
                       } else {
                           const double d = distance(cur, {mean[0] / count, mean[1] / count,
                                                           mean[2] / count});
                           if (d < best) {
                               best = d;
                               closest[0] = yy[0];
                               closest[1] = yy[1];
                               closest[2] = yy[2];
                           }
                       }
                       return true;
                   });
        if (settled) return lab;

        if (have_section && crossings.size() >= 3) {
            const auto& c2 = crossings[crossings.size() - 1];
            const auto& c1 = crossings[crossings.size() - 2];
            const auto& c0 = crossings[crossings.size() - 3];
            const double tau1 = c1.t - c0.t, tau2 = c2.t - c1.t;
            if (distance(c2.s, c1.s) < kCycleMatch &&
                std::abs(tau2 - tau1) < 1e-3 * std::max(tau1, tau2)) {
                lab.kind = AttractorLabel::Kind::cycle;
                lab.period = tau2;
                lab.reference = c2.s;
                lab.transient_time = c0.t;
                return lab;
            }
        }

        if (!have_section && count > 0) {
            // plane through the point nearest the chunk mean, normal = velocity
            const State a{closest[0], closest[1], closest[2]};
            const State v = rhs(a, p);
            const double nv = std::sqrt(v.S * v.S + v.x1 * v.x1 + v.x2 * v.x2);
            if (nv > 1e-12) {
                sec_a[0] = a.S;
                sec_a[1] = a.x1;
                sec_a[2] = a.x2;
                sec_n[0] = v.S / nv;
                sec_n[1] = v.x1 / nv;
                sec_n[2] = v.x2 / nv;
                have_section = true;
            }
        } else if (have_section && crossings.empty()) {
            have_section = false;  // section missed the attractor, re-anchor
        }
    }
    lab.kind = AttractorLabel::Kind::unresolved;
    lab.transient_time = budget;
    return lab;
}

AttractorLabel classify_attractor(const State& init, const ModelParams& p, double budget) {
    std::vector<Equilibrium> known;
    known.push_back(washout_equilibrium(p));
    for (auto& e : find_coexistence(p)) known.push_back(e);
    return classify_attractor(init, p, budget, known, 1e-8);
}

State BasinMap::cell_center(int i1, int i2) const {
    const double x1 = spec.x1_lo + (spec.x1_hi - spec.x1_lo) * (i1 + 0.5) / spec.n1;
    const double x2 = spec.x2_lo + (spec.x2_hi - spec.x2_lo) * (i2 + 0.5) / spec.n2;
    return {spec.S0, x1, x2};
}

BasinMap basin_map(const BasinSpec& spec_in, const ModelParams& p, double budget, double tol) {
    BasinMap map;
    map.spec = spec_in;
    if (map.spec.S0 < 0) map.spec.S0 = p.operating.S_in / 2.0;
    if (map.spec.x1_hi <= map.spec.x1_lo) {
        const double b = omega_bound(p);
        map.spec.x1_lo = map.spec.x2_lo = 0.01 * b;
        map.spec.x1_hi = map.spec.x2_hi = 0.20 * b;
    }
    map.equilibria.push_back(washout_equilibrium(p));
    for (auto& e : find_coexistence(p)) map.equilibria.push_back(e);

    const int total = map.spec.n1 * map.spec.n2;
    map.labels.resize(total);
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> jobs;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&]() {
            int k;
            while ((k = next.fetch_add(1)) < total) {
                const int i2 = k / map.spec.n1, i1 = k % map.spec.n1;
                map.labels[k] = classify_attractor(map.cell_center(i1, i2), p, budget,
                                                   map.equilibria, tol);
            }
        }));
    }
    for (auto& j : jobs) j.get();
    return map;
}

bool same_attractor(const AttractorLabel& a, const AttractorLabel& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == AttractorLabel::Kind::equilibrium)
        return a.equilibrium_index == b.equilibrium_index;
    if (a.kind == AttractorLabel::Kind::cycle)
        return std::abs(a.period - b.period) < 0.05 * std::max(a.period, b.period);
    return true;
}

} // namespace mutbif
