// Acceptance suite: one pass/fail line per criterion, wall-clock timed.
// Exit code = number of failed criteria. `--only N` runs a single criterion.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "mutbif/atlas.hpp"

using namespace mutbif;

namespace {

int g_checks = 0, g_failures = 0;
std::vector<std::string> g_notes;

void expect(bool ok, const std::string& what) {
    ++g_checks;
    if (!ok) {
        ++g_failures;
        g_notes.push_back("      FAILED: " + what);
    }
}

void note(const std::string& what) { g_notes.push_back("      note: " + what); }

struct Criterion {
    int id;
    std::string title;
    std::function<void()> run;
};

// ---------------------------------------------------------------- shared data

const std::vector<double> kSliceDs = {0.195, 0.2, 0.22, 0.224, 0.23};

const SliceResult& slice(double D) {
    static std::map<double, SliceResult> cache;
    auto it = cache.find(D);
    if (it == cache.end()) {
        SliceOptions opt;
        it = cache.emplace(D, analyze_slice(default_params(), D, opt)).first;
    }
    return it->second;
}

std::vector<const BifurcationEvent*> events_of(const SliceResult& s, EventType t) {
    std::vector<const BifurcationEvent*> out;
    for (const auto& ev : s.events)
        if (ev.type == t) out.push_back(&ev);
    return out;
}

char buf_[256];
std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf_, sizeof(buf_), f, ap);
    va_end(ap);
    return buf_;
}

// independent fold oracle: bisection on the scanner's equilibrium count
double lp_sigma_oracle(double D, double lo, double hi) {
    ModelParams p = default_params().with_D(D);
    auto count = [&](double s) { return find_coexistence(p.with_S_in(s)).size(); };
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count(mid) >= 2)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// ------------------------------------------------------------------ criteria

void criterion1() {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        ModelParams p = default_params();
        p.growth.m1 = 1 + 5 * u(rng);
        p.growth.m2 = 1 + 5 * u(rng);
        p.growth.K1 = 0.02 + u(rng);
        p.growth.K2 = 0.02 + u(rng);
        p.growth.L1 = 0.02 + u(rng);
        p.growth.L2 = 0.02 + u(rng);
        p.removal.alpha1 = u(rng);
        p.removal.alpha2 = u(rng);
        p.removal.a1 = 2 * u(rng) + 1e-3;
        p.removal.a2 = 2 * u(rng) + 1e-3;
        p.operating.D = 0.05 + u(rng);
        p.operating.S_in = 5 * u(rng);
        const Equilibrium e0 = washout_equilibrium(p);
        expect(e0.stability == Stability::les, "washout must be LES");
        expect(e0.eigenvalues[0] == std::complex<double>(-p.operating.D, 0.0),
               "first eigenvalue is exactly -D");
        expect(e0.eigenvalues[1] == std::complex<double>(-p.D1(), 0.0),
               "second eigenvalue is exactly -D1");
        expect(e0.eigenvalues[2] == std::complex<double>(-p.D2(), 0.0),
               "third eigenvalue is exactly -D2");
    }
}

void criterion2() {
    ModelParams p = no_mortality_params();
    auto eqs = find_coexistence(p.with_S_in(0.5));
    expect(eqs.size() == 2, "two coexistence equilibria at S_in=0.5 without mortality");
    if (eqs.size() < 2) return;
    const Branch br = continue_equilibria(eqs[0], p.with_S_in(0.5), FreeParam::S_in, 0.05, 1.0);
    const BifurcationEvent* lp = nullptr;
    for (const auto& ev : br.events)
        if (ev.type == EventType::LP) lp = &ev;
    expect(lp != nullptr, "LP event on the no-mortality branch");
    if (lp) {
        expect(std::abs(lp->param - 0.1687) <= 5e-4,
               fmt("no-mortality fold at %.5f, table 0.1687 +- 0.0005", lp->param));
        note(fmt("no-mortality LP at S_in = %.6f", lp->param));
    }
}

struct TableEvent {
    EventType type;
    double sigma;
    double tol;
    double period;            // 0: none
    State state;              // S<0: none
};

void check_table(double D, const std::vector<TableEvent>& rows, bool strict_order) {
    const SliceResult& s = slice(D);
    std::map<EventType, std::vector<const BifurcationEvent*>> got;
    for (const auto& ev : s.events) got[ev.type].push_back(&ev);

    std::map<EventType, size_t> used;
    std::vector<std::pair<double, double>> order_pairs;  // (expected sigma, located sigma)
    for (const auto& row : rows) {
        auto& list = got[row.type];
        size_t& idx = used[row.type];
        if (idx >= list.size()) {
            expect(false, fmt("D=%.3f: missing event near sigma=%.6f", D, row.sigma));
            continue;
        }
        const BifurcationEvent* ev = list[idx++];
        expect(std::abs(ev->param - row.sigma) <= row.tol,
               fmt("D=%.3f %s at %.7f vs table %.7f (tol %.1e)", D,
                   ev->type == EventType::LP    ? "LP"
                   : ev->type == EventType::H   ? "H"
                   : ev->type == EventType::LPC ? "LPC"
                   : ev->type == EventType::PD  ? "PD"
                                                : "Hom",
                   ev->param, row.sigma, row.tol));
        order_pairs.push_back({row.sigma, ev->param});
        if (row.period > 0)
            expect(std::abs(ev->period - row.period) <= 0.02 * row.period,
                   fmt("D=%.3f period %.3f vs table %.3f (2%%)", D, ev->period, row.period));
        if (row.state.S >= 0) {
            expect(std::abs(ev->state.S - row.state.S) <= 2e-3 &&
                       std::abs(ev->state.x1 - row.state.x1) <= 2e-3 &&
                       std::abs(ev->state.x2 - row.state.x2) <= 2e-3,
                   fmt("D=%.3f state (%.4f,%.4f,%.4f) vs table (%.3f,%.3f,%.3f)", D, ev->state.S,
                       ev->state.x1, ev->state.x2, row.state.S, row.state.x1, row.state.x2));
        }
    }
    if (strict_order) {
        // located sigmas must reproduce the table ordering
        bool ordered = true;
        std::vector<std::pair<double, double>> sorted_expected = order_pairs;
        std::sort(sorted_expected.begin(), sorted_expected.end());
        for (size_t k = 1; k < sorted_expected.size(); ++k)
            if (sorted_expected[k].second <= sorted_expected[k - 1].second) ordered = false;
        expect(ordered, fmt("D=%.3f: event order must match the table exactly", D));
    }
}

void criterion3() {
    const State none{-1, 0, 0};
    // D = 0.195 (table: LP, Hom, PD, H)
    check_table(0.195,
                {{EventType::LP, 2.883, 2e-3, 0, {0.669, 0.190, 0.143}},
                 {EventType::Hom, 3.277, 2e-3, 0, none},
                 {EventType::PD, 3.280, 5e-4, 17.77, none},
                 {EventType::H, 3.289, 2e-3, 0, {0.338, 0.243, 0.196}}},
                false);
    // D = 0.2 (table: LP, Hom, LPC, PD, LPC, H)
    check_table(0.2,
                {{EventType::LP, 2.8504, 2e-3, 0, {0.665, 0.191, 0.144}},
                 {EventType::Hom, 3.2307, 2e-3, 0, none},
                 {EventType::LPC, 3.2319, 5e-4, 11.83, none},
                 {EventType::PD, 3.2323, 5e-4, 18.47, none},
                 {EventType::LPC, 3.2325, 5e-4, 16.11, none},
                 {EventType::H, 3.2381, 2e-3, 0, {0.341, 0.244, 0.197}}},
                false);
    // D = 0.22: ~5e-5 windows; order must be exact, 6-digit values to 2e-5
    check_table(0.22,
                {{EventType::LP, 2.736, 2e-3, 0, {0.652, 0.197, 0.150}},
                 {EventType::LPC, 3.0585, 5e-4, 9.60, none},
                 {EventType::H, 3.0590, 2e-3, 0, {0.352, 0.247, 0.200}},
                 {EventType::Hom, 3.066645, 2e-3, 0, none},
                 {EventType::PD, 3.066687, 2e-5, 26.26, none},
                 {EventType::LPC, 3.066688, 2e-5, 26.13, none}},
                true);
    // D = 0.224 (LP, LPC, H, Hom)
    check_table(0.224,
                {{EventType::LP, 2.716, 2e-3, 0, {0.650, 0.198, 0.151}},
                 {EventType::LPC, 3.02724, 5e-4, 9.3, none},
                 {EventType::H, 3.02736, 2e-3, 0, {0.354, 0.247, 0.201}},
                 {EventType::Hom, 3.0376, 2e-3, 0, none}},
                true);
    // D = 0.23 (LP, H, Hom). The printed sigma_1 ~ 2.736 in the paper's table
    // duplicates the D=0.22 row and contradicts both its own state column
    // (0.647, 0.199, 0.152) and the monotone trend of the LP curve; the fold
    // is asserted against an independent scanner-bisection oracle instead,
    // and the state against the table triple.
    const double lp023 = lp_sigma_oracle(0.23, 2.5, 2.9);
    note(fmt("D=0.230 fold oracle at sigma = %.5f; table prints 2.736 (typo, "
             "state column matches %.5f)",
             lp023, lp023));
    check_table(0.23,
                {{EventType::LP, lp023, 2e-3, 0, {0.647, 0.199, 0.152}},
                 {EventType::H, 2.982, 2e-3, 0, {0.357, 0.248, 0.201}},
                 {EventType::Hom, 2.996, 2e-3, 0, none}},
                true);
}

void criterion4() {
    // state comparisons are asserted inside criterion 3's table rows; this
    // criterion re-reports the LP and H states at the two headline slices
    for (double D : {0.2, 0.195}) {
        const SliceResult& s = slice(D);
        const auto lp = events_of(s, EventType::LP);
        const auto h = events_of(s, EventType::H);
        expect(!lp.empty() && !h.empty(), fmt("D=%.3f has LP and H events", D));
        if (lp.empty() || h.empty()) continue;
        const State lp_tab = D == 0.2 ? State{0.665, 0.191, 0.144} : State{0.669, 0.190, 0.143};
        const State h_tab = D == 0.2 ? State{0.341, 0.244, 0.197} : State{0.338, 0.243, 0.196};
        expect(std::abs(lp[0]->state.S - lp_tab.S) <= 2e-3 &&
                   std::abs(lp[0]->state.x1 - lp_tab.x1) <= 2e-3 &&
                   std::abs(lp[0]->state.x2 - lp_tab.x2) <= 2e-3,
               fmt("D=%.3f LP state within 0.002 per component", D));
        expect(std::abs(h[0]->state.S - h_tab.S) <= 2e-3 &&
                   std::abs(h[0]->state.x1 - h_tab.x1) <= 2e-3 &&
                   std::abs(h[0]->state.x2 - h_tab.x2) <= 2e-3,
               fmt("D=%.3f H state within 0.002 per component", D));
    }
}

void criterion5() {
    const double expected_sign[] = {-1, -1, -1, -1, +1};
    const double paper_values[] = {-0.347, -0.294, -0.085, -0.044, 0.017};
    for (size_t k = 0; k < kSliceDs.size(); ++k) {
        const SliceResult& s = slice(kSliceDs[k]);
        expect(s.has_hopf, fmt("D=%.3f Hopf present", kSliceDs[k]));
        if (!s.has_hopf) continue;
        expect(s.l1 * expected_sign[k] > 0,
               fmt("D=%.3f sign(l1) = %+.0f (l1 = %.4f, paper %.3f)", kSliceDs[k],
                   expected_sign[k], s.l1, paper_values[k]));
    }
}

void criterion6() {
    const SliceResult& s02 = slice(0.2);
    const BifurcationEvent* lp_seed = nullptr;
    const BifurcationEvent* h_seed = nullptr;
    for (const auto& ev : s02.events) {
        if (ev.type == EventType::LP) lp_seed = &ev;
        if (ev.type == EventType::H) h_seed = &ev;
    }
    expect(lp_seed && h_seed, "seed events at D=0.2");
    if (!lp_seed || !h_seed) return;

    Window win{0.0, 5.0, 0.05, 0.8};
    const BifCurve lp = continue_lp_curve(default_params(), lp_seed->param, lp_seed->state, win);
    std::vector<Codim2Point> bt;
    const BifCurve hopf =
        continue_hopf_curve(default_params(), h_seed->param, h_seed->state, win, &bt);

    Window band{2.8, 3.6, 0.19, 0.232};
    SliceOptions opt;
    opt.keep_family_curves = true;
    const CycleCurveSweep sweep =
        sweep_cycle_curves(default_params(), 0.19, 0.232, 22, band, opt);
    const auto codim2 = locate_codim2(lp, hopf, bt, sweep);

    auto find = [&](Codim2Point::Type t) -> const Codim2Point* {
        for (const auto& c : codim2)
            if (c.type == t) return &c;
        return nullptr;
    };
    const Codim2Point* p_bt = find(Codim2Point::Type::BT);
    const Codim2Point* p_gh = find(Codim2Point::Type::GH);
    const Codim2Point* p_cpc = find(Codim2Point::Type::CPC);
    const Codim2Point* p_r1 = find(Codim2Point::Type::R1);
    const Codim2Point* p_r2 = find(Codim2Point::Type::R2);

    expect(p_bt != nullptr, "BT located");
    if (p_bt) {
        expect(std::hypot(p_bt->S_in - 2.243, p_bt->D - 0.550) <= 0.05,
               fmt("BT (%.4f, %.4f) within 0.05 of (2.243, 0.550)", p_bt->S_in, p_bt->D));
        note(fmt("BT = (%.4f, %.4f), uncertainty %.2e", p_bt->S_in, p_bt->D, p_bt->uncertainty));
    }
    expect(p_gh != nullptr, "GH located");
    if (p_gh) {
        expect(std::hypot(p_gh->S_in - 2.995, p_gh->D - 0.228) <= 0.01,
               fmt("GH (%.4f, %.4f) within 0.01 of (2.995, 0.228)", p_gh->S_in, p_gh->D));
        note(fmt("GH = (%.4f, %.4f), uncertainty %.2e", p_gh->S_in, p_gh->D, p_gh->uncertainty));
    }
    expect(p_cpc != nullptr, "CPC located");
    if (p_cpc) {
        expect(std::hypot(p_cpc->S_in - 3.271, p_cpc->D - 0.196) <= 0.01,
               fmt("CPC (%.4f, %.4f) within 0.01 of (3.271, 0.196)", p_cpc->S_in, p_cpc->D));
        note(fmt("CPC = (%.4f, %.4f), uncertainty %.2e", p_cpc->S_in, p_cpc->D,
                 p_cpc->uncertainty));
    }
    expect(p_r2 != nullptr, "R2 located");
    if (p_r2) {
        expect(std::hypot(p_r2->S_in - 3.0437, p_r2->D - 0.2232) <= 0.01,
               fmt("R2 (%.4f, %.4f) within 0.01 of (3.0437, 0.2232)", p_r2->S_in, p_r2->D));
        note(fmt("R2 = (%.4f, %.4f), uncertainty %.2e", p_r2->S_in, p_r2->D, p_r2->uncertainty));
    }
    expect(p_r1 != nullptr, "R1 proxy located");
    if (p_r1) {
        expect(p_r1->proxy, "R1 carries the proxy flag");
        expect(std::hypot(p_r1->S_in - 3.0396, p_r1->D - 0.2237) <= 0.01,
               fmt("R1 (%.4f, %.4f) within 0.01 of (3.0396, 0.2237)", p_r1->S_in, p_r1->D));
        note(fmt("R1 = (%.4f, %.4f), uncertainty %.2e (proxy)", p_r1->S_in, p_r1->D,
                 p_r1->uncertainty));
    }
}

void criterion7() {
    ModelParams p = default_params().with_S_in(3.2324);
    BasinSpec spec;
    spec.n1 = spec.n2 = 21;
    spec.x1_lo = spec.x2_lo = 0.02;
    spec.x1_hi = spec.x2_hi = 0.62;
    const BasinMap map = basin_map(spec, p, 5000.0);
    bool washout_seen = false;
    std::vector<double> cycle_periods;
    for (const auto& lab : map.labels) {
        if (lab.kind == AttractorLabel::Kind::equilibrium && lab.equilibrium_index == 0)
            washout_seen = true;
        if (lab.kind == AttractorLabel::Kind::cycle) {
            bool fresh = true;
            for (double t : cycle_periods)
                if (std::abs(t - lab.period) < 0.1 * std::max(t, lab.period)) fresh = false;
            if (fresh) cycle_periods.push_back(lab.period);
        }
    }
    expect(washout_seen, "washout basin present");
    expect(cycle_periods.size() >= 2, fmt("two distinct cycle attractors (found %zu)",
                                          cycle_periods.size()));
    if (cycle_periods.size() >= 2) {
        std::sort(cycle_periods.begin(), cycle_periods.end());
        const double lo = cycle_periods.front(), hi = cycle_periods.back();
        expect(hi - lo > 0.2 * lo, fmt("cycle periods %.2f and %.2f differ by > 20%%", lo, hi));
        note(fmt("attractors: washout + cycles with T = %.2f and %.2f", lo, hi));
    }
}

void criterion8() {
    const SliceResult& s = slice(0.2);
    const auto hom = events_of(s, EventType::Hom);
    expect(hom.size() == 1, "homoclinic fit resolved at D=0.2");
    if (hom.empty()) return;
    expect(hom[0]->fit_r2 >= 0.99, fmt("log-fit R^2 = %.5f >= 0.99", hom[0]->fit_r2));
    expect(std::abs(hom[0]->param - 3.2307) <= 2e-3,
           fmt("sigma_hom = %.5f vs 3.2307 +- 0.002", hom[0]->param));
}

void criterion9() {
    std::mt19937 rng(909);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int found = 0;
    long tries = 0;
    while (found < 500 && tries < 200000) {
        ++tries;
        ModelParams p = default_params();
        p.growth.m1 = 2.5 + 3 * u(rng);
        p.growth.m2 = 2.5 + 3 * u(rng);
        p.growth.K1 = 0.05 + 0.4 * u(rng);
        p.growth.K2 = 0.05 + 0.4 * u(rng);
        p.growth.L1 = 0.1 + 0.4 * u(rng);
        p.growth.L2 = 0.1 + 0.4 * u(rng);
        p.removal.a1 = 1.5 * u(rng);
        p.removal.a2 = 1.5 * u(rng);
        p.operating.D = 0.1 + 0.3 * u(rng);
        p.operating.S_in = 1.0 + 4.0 * u(rng);
        const auto eqs = find_coexistence(p);
        for (const auto& eq : eqs) {
            ++found;
            const double det = jacobian(eq.state, p).determinant();
            expect(std::abs(eq.rh.c3 + det) <= 1e-8 * (1 + std::abs(eq.rh.c3)),
                   "c3 = -det(J*) to rel 1e-8");
            const auto [E, G] = growth_partials(1, eq.state.S, eq.state.x2, p);
            const auto [F, H] = growth_partials(2, eq.state.S, eq.state.x1, p);
            const double expect_c3 = -p.D1() * p.D2() * E * F / p.operating.D *
                                     (slope_product(eq.state, p) - 1.0) * eq.state.x1 *
                                     eq.state.x2;
            expect(std::abs(eq.rh.c3 - expect_c3) <= 1e-8 * (1 + std::abs(eq.rh.c3)),
                   "product form of c3 to rel 1e-8");
        }
        // F-curve implicit residual and discriminant positivity
        if (tries % 100 == 1) {
            for (int i = 1; i <= 2; ++i) {
                expect(phi_quadratic_discriminant(i, p) > 0, "phi discriminant positive");
                const auto dom = phi_roots(i, p);
                if (!dom) continue;
                for (int k = 1; k < 40; ++k) {
                    const double xj = dom->x_lo + (dom->x_hi - dom->x_lo) * k / 40.0;
                    const double xi = F_curve(i, xj, p);
                    const double x1 = (i == 1) ? xi : xj, x2 = (i == 1) ? xj : xi;
                    const double S = p.operating.S_in - p.D1() / p.operating.D * x1 -
                                     p.D2() / p.operating.D * x2;
                    expect(std::abs(growth(i, S, xj, p) - p.removal_rate(i)) < 1e-10,
                           "F-curve implicit residual < 1e-10");
                }
            }
        }
    }
    expect(found >= 500, fmt("500 coexistence equilibria sampled (got %d)", found));

    // Liouville on 20 distinct cycles along the D=0.195 family
    const SliceResult& s = slice(0.195);
    const auto hs = events_of(s, EventType::H);
    expect(!hs.empty(), "Hopf event at D=0.195 for the Liouville battery");
    if (!hs.empty()) {
        ModelParams p = default_params().with_D(0.195);
        CyclePolicy pol;
        const LimitCycle seed = cycle_from_hopf(*hs[0], p, pol);
        const CycleFamily fam =
            continue_cycles(seed, p, hs[0]->param - 0.06, hs[0]->param + 0.06, pol);
        // short cycles only: the smallest multiplier scales like e^(-T) and
        // must stay above the monodromy's eigenvalue round-off for a
        // meaningful 1e-5 product check
        std::vector<const CyclePoint*> picks;
        for (const auto& pt : fam.points)
            if (pt.multipliers_reliable && pt.T < 12.0) picks.push_back(&pt);
        expect(picks.size() >= 20, fmt("family provides 20 usable cycles (%zu)", picks.size()));
        const size_t stride = picks.size() >= 20 ? picks.size() / 20 : 1;
        int done = 0;
        for (size_t k = 0; k < picks.size() && done < 20; k += stride) {
            LimitCycle c;
            c.nodes = ShootingSystem::unpack_nodes(picks[k]->z, pol.segments);
            c.period = picks[k]->T;
            c.param = picks[k]->param;
            c.anchor = c.nodes[0];
            c.anchor_velocity = rhs(c.anchor, p.with_S_in(c.param));
            std::complex<double> prod = 1.0;
            for (const auto& m : floquet(c, p)) prod *= m;
            const double liouville = std::exp(divergence_integral(c, p));
            expect(std::abs(prod.real() - liouville) <= 1e-5 * std::abs(liouville),
                   fmt("Liouville product at S_in = %.5f (T = %.2f)", c.param, c.period));
            ++done;
        }
        expect(done == 20, "20 cycles checked");
    }
}

void criterion10() {
    std::mt19937 rng(1010);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 20; ++draw) {
        ModelParams p = default_params();
        p.growth.m1 = 2.5 + 3 * u(rng);
        p.growth.m2 = 2.5 + 3 * u(rng);
        p.growth.K1 = 0.05 + 0.4 * u(rng);
        p.growth.K2 = 0.05 + 0.4 * u(rng);
        p.growth.L1 = 0.1 + 0.4 * u(rng);
        p.growth.L2 = 0.1 + 0.4 * u(rng);
        p.removal.a1 = 1.5 * u(rng);
        p.removal.a2 = 1.5 * u(rng);
        p.operating.D = 0.1 + 0.3 * u(rng);
        p.operating.S_in = 1.0 + 4.0 * u(rng);
        const auto eqs = find_coexistence(p);
        const auto oracle = coexistence_grid_oracle(p, 200);
        expect(eqs.size() == oracle.size(),
               fmt("draw %d: scanner count %zu vs oracle %zu", draw, eqs.size(), oracle.size()));
        if (eqs.size() == oracle.size())
            for (size_t k = 0; k < eqs.size(); ++k)
                expect(distance(eqs[k].state, oracle[k]) < 1e-8,
                       fmt("draw %d: set member %zu within 1e-8", draw, k));
    }
}

void criterion11() {
    std::mt19937 rng(1111);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int draws_done = 0;
    while (draws_done < 5) {
        ModelParams p = no_mortality_params();
        p.growth.m1 = 3 + 2 * u(rng);
        p.growth.m2 = 3 + 2 * u(rng);
        p.growth.K1 = 0.1 + 0.3 * u(rng);
        p.growth.K2 = 0.05 + 0.3 * u(rng);
        p.growth.L1 = 0.2 + 0.3 * u(rng);
        p.growth.L2 = 0.1 + 0.3 * u(rng);
        p.operating.D = 0.15 + 0.15 * u(rng);
        p.operating.S_in = 0.02 + 0.1 * u(rng);
        if (!find_coexistence(p).empty()) continue;  // needs region J0
        ++draws_done;
        BasinSpec spec;
        spec.n1 = spec.n2 = 21;
        const BasinMap map = basin_map(spec, p, 3000.0);
        int washout = 0;
        for (const auto& lab : map.labels)
            washout += (lab.kind == AttractorLabel::Kind::equilibrium &&
                        lab.equilibrium_index == 0);
        expect(washout == 21 * 21,
               fmt("draw %d: all 441 cells reach washout (%d did)", draws_done, washout));
    }
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int k = 1; k < argc; ++k)
        if (!std::strcmp(argv[k], "--only") && k + 1 < argc) only = std::atoi(argv[k + 1]);

    std::vector<Criterion> cs = {
        {1, "washout spectrum (-D, -D1, -D2) closed form, 100 random sets", criterion1},
        {2, "no-mortality fold at S_in = 0.1687 +- 0.0005 (D = 0.2)", criterion2},
        {3, "one-parameter tables at D in {0.195, 0.2, 0.22, 0.224, 0.23}", criterion3},
        {4, "equilibrium coordinates at events within 0.002", criterion4},
        {5, "Hopf criticality signs across the five dilution rates", criterion5},
        {6, "codimension-two points BT/GH/CPC/R2/R1-proxy", criterion6},
        {7, "tri-stability at (3.2324, 0.2): washout + two cycles", criterion7},
        {8, "homoclinic log fit: R^2 >= 0.99, sigma_hom = 3.2307 +- 0.002", criterion8},
        {9, "analytic identity suite (500 equilibria, 20 cycles)", criterion9},
        {10, "scanner equals the 200x200 grid oracle on 20 draws", criterion10},
        {11, "global washout stability in region J0 without mortality", criterion11},
    };

    int failed_criteria = 0;
    for (const auto& c : cs) {
        if (only && c.id != only) continue;
        g_failures = 0;
        g_checks = 0;
        g_notes.clear();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run();
        } catch (const std::exception& e) {
            expect(false, std::string("exception: ") + e.what());
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = g_failures == 0;
        failed_criteria += !pass;
        std::printf("[%s] criterion %2d: %s  (%d checks, %.1f s)\n", pass ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), g_checks, dt);
        for (const auto& n : g_notes) std::printf("%s\n", n.c_str());
        std::fflush(stdout);
    }
    return failed_criteria;
}
