#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mutbif/atlas.hpp"

using json = nlohmann::json;
using namespace mutbif;

namespace {

json state_json(const State& s) { return json{{"S", s.S}, {"x1", s.x1}, {"x2", s.x2}}; }

json equilibrium_json(const Equilibrium& eq) {
    json j;
    j["state"] = state_json(eq.state);
    j["kind"] = eq.kind == EquilibriumKind::washout ? "washout" : "coexistence";
    if (eq.kind == EquilibriumKind::coexistence) {
        j["c1"] = eq.rh.c1;
        j["c2"] = eq.rh.c2;
        j["c3"] = eq.rh.c3;
        j["c4"] = eq.rh.c4;
    }
    json eigs = json::array();
    for (const auto& ev : eq.eigenvalues) eigs.push_back({{"re", ev.real()}, {"im", ev.imag()}});
    j["eigenvalues"] = eigs;
    j["stability"] = eq.stability == Stability::les ? "LES" : "unstable";
    if (eq.critical) j["critical"] = true;
    return j;
}

std::string event_name(EventType t) {
    switch (t) {
        case EventType::LP: return "LP";
        case EventType::H: return "H";
        case EventType::LPC: return "LPC";
        case EventType::PD: return "PD";
        case EventType::Hom: return "Hom";
        case EventType::branch_end: return "end";
    }
    return "?";
}

json event_json(const BifurcationEvent& ev) {
    json j;
    j["type"] = event_name(ev.type);
    j["param"] = ev.param;
    j["state"] = state_json(ev.state);
    if (ev.type == EventType::H) {
        j["l1"] = ev.l1;
        j["omega"] = ev.nu;
    }
    if (ev.type == EventType::LPC || ev.type == EventType::PD || ev.type == EventType::Hom)
        j["period"] = ev.period;
    if (ev.type == EventType::Hom) j["fit_r2"] = ev.fit_r2;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

int cmd_equilibria(const std::string& config, double sin_override, double d_override,
                   const std::string& out) {
    ModelParams p = load_params(config);
    if (sin_override >= 0) p.operating.S_in = sin_override;
    if (d_override > 0) p.operating.D = d_override;
    json j;
    j["parameters"] = {{"S_in", p.operating.S_in}, {"D", p.operating.D}};
    json list = json::array();
    list.push_back(equilibrium_json(washout_equilibrium(p)));
    for (const auto& eq : find_coexistence(p)) list.push_back(equilibrium_json(eq));
    j["equilibria"] = list;
    write_file(out, j.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const std::string& config, const std::vector<double>& x0, double tend,
                 double tol, const std::string& out) {
    ModelParams p = load_params(config);
    const Trajectory tr =
        integrate({x0[0], x0[1], x0[2]}, p, tend, tol, tend > 2000 ? 0.5 : 0.05);
    std::string csv = "t,S,x1,x2\n";
    char line[160];
    for (size_t k = 0; k < tr.t.size(); ++k) {
        std::snprintf(line, sizeof(line), "%.10g,%.12g,%.12g,%.12g\n", tr.t[k], tr.y[k].S,
                      tr.y[k].x1, tr.y[k].x2);
        csv += line;
    }
    write_file(out, csv);
    return 0;
}

int cmd_basin(const std::string& config, const BasinSpec& spec, double budget,
              const std::string& out) {
    ModelParams p = load_params(config);
    const BasinMap map = basin_map(spec, p, budget);
    std::string csv = "x1,x2,S0,kind,detail,period,transient\n";
    char line[240];
    for (int i2 = 0; i2 < map.spec.n2; ++i2) {
        for (int i1 = 0; i1 < map.spec.n1; ++i1) {
            const State c = map.cell_center(i1, i2);
            const auto& lab = map.labels[i2 * map.spec.n1 + i1];
            const char* kind = lab.kind == AttractorLabel::Kind::equilibrium ? "equilibrium"
                               : lab.kind == AttractorLabel::Kind::cycle     ? "cycle"
                                                                             : "unresolved";
            std::string detail = "-";
            if (lab.kind == AttractorLabel::Kind::equilibrium)
                detail = lab.equilibrium_index == 0
                             ? "washout"
                             : ("E" + std::to_string(lab.equilibrium_index) + "*");
            std::snprintf(line, sizeof(line), "%.8g,%.8g,%.8g,%s,%s,%.8g,%.6g\n", c.x1, c.x2,
                          c.S, kind, detail.c_str(), lab.period, lab.transient_time);
            csv += line;
        }
    }
    write_file(out, csv);
    return 0;
}

int cmd_branch(const std::string& config, const std::string& free, double from, double to,
               double d_override, const std::string& out) {
    ModelParams p = load_params(config);
    if (d_override > 0) p.operating.D = d_override;
    const FreeParam fp = (free == "d") ? FreeParam::D : FreeParam::S_in;

    // start from a parameter value inside the range with a coexistence pair
    std::vector<Equilibrium> eqs;
    double ref = 0;
    for (int k = 0; k <= 40 && eqs.size() < 2; ++k) {
        ref = from + (to - from) * k / 40.0;
        ModelParams q = (fp == FreeParam::S_in) ? p.with_S_in(ref) : p.with_D(ref);
        eqs = find_coexistence(q);
    }
    if (eqs.size() < 2) {
        std::cerr << "branch: no coexistence equilibria inside the range\n";
        return 3;
    }
    ModelParams q = (fp == FreeParam::S_in) ? p.with_S_in(ref) : p.with_D(ref);
    const Branch br = continue_equilibria(eqs[0], q, fp, from, to);

    std::string csv = "arclength,param,S,x1,x2,c1,c2,c3,c4,mu,nu\n";
    char line[320];
    for (const auto& bp : br.points) {
        std::snprintf(line, sizeof(line), "%.8g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      bp.arclength, bp.param, bp.state.S, bp.state.x1, bp.state.x2, bp.rh.c1,
                      bp.rh.c2, bp.rh.c3, bp.rh.c4, bp.mu, bp.nu);
        csv += line;
    }
    write_file(out, csv);

    json jev = json::array();
    for (const auto& ev : br.events) jev.push_back(event_json(ev));
    const std::string evpath =
        out.size() > 4 && out.substr(out.size() - 4) == ".csv"
            ? out.substr(0, out.size() - 4) + ".events.json"
            : out + ".events.json";
    write_file(evpath, jev.dump(2) + "\n");
    write_file(evpath + ".svg", plot_branch_diagram(br, {}));
    return 0;
}

int cmd_cycles(const std::string& config, double d_override, bool from_hopf,
               const std::string& seed_path, double range_lo, double range_hi,
               const std::string& out) {
    ModelParams p = load_params(config);
    if (d_override > 0) p.operating.D = d_override;

    CyclePolicy pol;
    LimitCycle seed;
    if (from_hopf) {
        SliceOptions opt;
        opt.keep_family_curves = false;
        const SliceResult sl = analyze_slice(p, p.operating.D, opt);
        if (!sl.has_hopf) {
            std::cerr << "cycles: no Hopf point found on the equilibrium branch\n";
            return 3;
        }
        BifurcationEvent h;
        for (const auto& ev : sl.events)
            if (ev.type == EventType::H) h = ev;
        seed = cycle_from_hopf(h, p, pol);
    } else {
        std::ifstream f(seed_path);
        if (!f) {
            std::cerr << "cycles: cannot open seed " << seed_path << "\n";
            return 3;
        }
        json j;
        f >> j;
        seed.period = j["period"];
        seed.param = j["param"];
        for (const auto& nd : j["nodes"])
            seed.nodes.push_back({nd["S"], nd["x1"], nd["x2"]});
        pol.segments = static_cast<int>(seed.nodes.size());
        seed.anchor = seed.nodes[0];
        seed.anchor_velocity = rhs(seed.anchor, p.with_S_in(seed.param));
    }
    if (range_lo == 0 && range_hi == 0) {
        range_lo = seed.param - 0.06;
        range_hi = seed.param + 0.06;
    }
    const CycleFamily fam = continue_cycles(seed, p, range_lo, range_hi, pol);

    std::string csv = "param,T,S0,x10,x20,mult1,mult2,stability\n";
    char line[280];
    for (const auto& pt : fam.points) {
        // nontrivial multipliers by magnitude distance from 1
        std::array<double, 3> dist;
        for (int k = 0; k < 3; ++k) dist[k] = std::abs(pt.multipliers[k] - 1.0);
        const int triv =
            static_cast<int>(std::min_element(dist.begin(), dist.end()) - dist.begin());
        std::vector<double> mags;
        for (int k = 0; k < 3; ++k)
            if (k != triv) mags.push_back(std::abs(pt.multipliers[k]));
        std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s\n",
                      pt.param, pt.T, pt.node0.S, pt.node0.x1, pt.node0.x2, mags[0], mags[1],
                      pt.stable ? "stable" : "unstable");
        csv += line;
    }
    write_file(out, csv);

    json jev = json::array();
    CyclePolicy fitpol = pol;
    for (const auto& ev : fam.events) jev.push_back(event_json(ev));
    if (auto hom = detect_homoclinic(fam, fitpol)) jev.push_back(event_json(*hom));
    const std::string evpath =
        out.size() > 4 && out.substr(out.size() - 4) == ".csv"
            ? out.substr(0, out.size() - 4) + ".events.json"
            : out + ".events.json";
    write_file(evpath, jev.dump(2) + "\n");
    write_file(evpath + ".svg", plot_period_curves(period_curve(fam)));
    return 0;
}

json curves_to_json(const BifCurve& c) {
    json pts = json::array();
    for (const auto& pt : c.points)
        pts.push_back({{"S_in", pt.S_in},
                       {"D", pt.D},
                       {"state", state_json(pt.state)},
                       {"aux", pt.aux},
                       {"l1", pt.l1}});
    return pts;
}

BifCurve curves_from_json(const json& pts, EventType type) {
    BifCurve c;
    c.type = type;
    for (const auto& j : pts) {
        BifCurvePoint pt;
        pt.S_in = j["S_in"];
        pt.D = j["D"];
        pt.aux = j.value("aux", 0.0);
        pt.l1 = j.value("l1", 0.0);
        c.points.push_back(pt);
    }
    return c;
}

int cmd_diagram(const std::string& config, const Window& win, int nx, int ny, int slices,
                double slice_dlo, double slice_dhi, const std::string& out_dir) {
    ModelParams base = load_params(config);
    std::filesystem::create_directories(out_dir);

    // seeds from the reference slice at the configured D
    SliceOptions sopt;
    sopt.keep_family_curves = false;
    const SliceResult ref = analyze_slice(base, base.operating.D, sopt);
    const BifurcationEvent* lp_seed = nullptr;
    const BifurcationEvent* h_seed = nullptr;
    for (const auto& ev : ref.events) {
        if (ev.type == EventType::LP) lp_seed = &ev;
        if (ev.type == EventType::H) h_seed = &ev;
    }
    if (!lp_seed) {
        std::cerr << "diagram: no LP event at the reference D; widen the config\n";
        return 3;
    }
    const BifCurve lp = continue_lp_curve(base, lp_seed->param, lp_seed->state, win);
    std::vector<Codim2Point> bt;
    BifCurve hopf;
    if (h_seed) hopf = continue_hopf_curve(base, h_seed->param, h_seed->state, win, &bt);

    SliceOptions sweep_opt;
    const CycleCurveSweep sweep =
        sweep_cycle_curves(base, slice_dlo, slice_dhi, slices, win, sweep_opt);
    const auto codim2 = locate_codim2(lp, hopf, bt, sweep);
    const RegionGrid grid = classify_regions(win, nx, ny, base, sweep, lp, hopf);

    json jc;
    jc["window"] = {{"sin_min", win.sin_min},
                    {"sin_max", win.sin_max},
                    {"d_min", win.d_min},
                    {"d_max", win.d_max}};
    jc["lp"] = curves_to_json(lp);
    jc["hopf"] = curves_to_json(hopf);
    jc["lpc"] = curves_to_json(sweep.lpc);
    jc["pd"] = curves_to_json(sweep.pd);
    write_file(out_dir + "/curves.json", jc.dump(2) + "\n");

    json j2 = json::array();
    for (const auto& c2 : codim2)
        j2.push_back({{"type", to_string(c2.type)},
                      {"S_in", c2.S_in},
                      {"D", c2.D},
                      {"uncertainty", c2.uncertainty},
                      {"proxy", c2.proxy},
                      {"provenance", c2.provenance}});
    write_file(out_dir + "/codim2.json", j2.dump(2) + "\n");

    std::string csv = "S_in,D,label,flagged\n";
    char line[160];
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            std::snprintf(line, sizeof(line), "%.8g,%.8g,%s,%d\n", grid.sin_at(i), grid.d_at(j),
                          grid.labels[j * grid.nx + i].c_str(), int(grid.flagged[j * grid.nx + i]));
            csv += line;
        }
    write_file(out_dir + "/regions.csv", csv);
    write_file(out_dir + "/diagram.svg", plot_operating_diagram(win, lp, hopf, sweep, codim2));

    bool any_flagged = false;
    for (auto f : grid.flagged) any_flagged |= (f != 0);
    return any_flagged ? 2 : 0;
}

int cmd_report(const std::string& in_dir) {
    std::ifstream fc(in_dir + "/curves.json");
    if (!fc) {
        std::cerr << "report: " << in_dir << "/curves.json not found\n";
        return 3;
    }
    json jc;
    fc >> jc;
    Window win;
    win.sin_min = jc["window"]["sin_min"];
    win.sin_max = jc["window"]["sin_max"];
    win.d_min = jc["window"]["d_min"];
    win.d_max = jc["window"]["d_max"];
    const BifCurve lp = curves_from_json(jc["lp"], EventType::LP);
    const BifCurve hopf = curves_from_json(jc["hopf"], EventType::H);
    CycleCurveSweep sweep;
    sweep.lpc = curves_from_json(jc["lpc"], EventType::LPC);
    sweep.pd = curves_from_json(jc["pd"], EventType::PD);

    std::vector<Codim2Point> codim2;
    std::ifstream f2(in_dir + "/codim2.json");
    if (f2) {
        json j2;
        f2 >> j2;
        for (const auto& j : j2) {
            Codim2Point c2;
            const std::string t = j["type"];
            c2.type = t == "BT"    ? Codim2Point::Type::BT
                      : t == "GH"  ? Codim2Point::Type::GH
                      : t == "R1"  ? Codim2Point::Type::R1
                      : t == "R2"  ? Codim2Point::Type::R2
                                   : Codim2Point::Type::CPC;
            c2.S_in = j["S_in"];
            c2.D = j["D"];
            c2.uncertainty = j.value("uncertainty", 0.0);
            c2.proxy = j.value("proxy", false);
            codim2.push_back(c2);
        }
    }
    write_file(in_dir + "/diagram.svg", plot_operating_diagram(win, lp, hopf, sweep, codim2));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bifurcation toolkit for the two-species mutualism chemostat model"};
    app.require_subcommand(1);

    std::string config, out = "out.json", seed_path, out_dir = "diagram-out", in_dir;
    double sin_override = -1, d_override = -1, tend = 100, tol = 1e-8, budget = 5000;
    double from = 2.0, to = 4.0, range_lo = 0, range_hi = 0;
    std::vector<double> x0{1.0, 0.1, 0.1};
    std::string free_param = "sin";
    bool from_hopf = false;
    BasinSpec bspec;
    std::vector<double> window{0.0, 5.0, 0.0, 0.8};
    std::vector<int> grid_nn{200, 160};
    int slices = 22;
    std::vector<double> slice_band{0.19, 0.232};

    auto* eq = app.add_subcommand("equilibria", "equilibrium inventory and stability");
    eq->add_option("--config", config)->required();
    eq->add_option("--sin", sin_override);
    eq->add_option("--d", d_override);
    eq->add_option("--out", out)->required();

    auto* sim = app.add_subcommand("simulate", "adaptive trajectory integration");
    sim->add_option("--config", config)->required();
    sim->add_option("--x0", x0)->expected(3);
    sim->add_option("--tend", tend);
    sim->add_option("--tol", tol);
    sim->add_option("--out", out)->required();

    auto* bas = app.add_subcommand("basin", "basin-of-attraction grid labels");
    bas->add_option("--config", config)->required();
    bas->add_option("--budget", budget);
    bas->add_option("--n1", bspec.n1);
    bas->add_option("--n2", bspec.n2);
    bas->add_option("--x1-range", bspec.x1_lo);  // paired with --x1-max
    bas->add_option("--x1-max", bspec.x1_hi);
    bas->add_option("--x2-range", bspec.x2_lo);
    bas->add_option("--x2-max", bspec.x2_hi);
    bas->add_option("--s0", bspec.S0);
    bas->add_option("--out", out)->required();

    auto* br = app.add_subcommand("branch", "equilibrium continuation in one parameter");
    br->add_option("--config", config)->required();
    br->add_option("--free", free_param)->check(CLI::IsMember({"sin", "d"}));
    br->add_option("--from", from)->required();
    br->add_option("--to", to)->required();
    br->add_option("--d", d_override);
    br->add_option("--out", out)->required();

    auto* cy = app.add_subcommand("cycles", "limit-cycle family continuation");
    cy->add_option("--config", config)->required();
    cy->add_option("--d", d_override);
    cy->add_flag("--from-hopf", from_hopf);
    cy->add_option("--seed", seed_path);
    cy->add_option("--range", range_lo);  // paired with --range-hi
    cy->add_option("--range-hi", range_hi);
    cy->add_option("--out", out)->required();

    auto* dg = app.add_subcommand("diagram", "two-parameter operating diagram");
    dg->add_option("--config", config)->required();
    dg->add_option("--window", window)->expected(4);
    dg->add_option("--grid", grid_nn)->expected(2);
    dg->add_option("--slices", slices);
    dg->add_option("--slice-band", slice_band)->expected(2);
    dg->add_option("--out-dir", out_dir);

    auto* rp = app.add_subcommand("report", "replay stored curves into SVG");
    rp->add_option("--in-dir", in_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (eq->parsed()) return cmd_equilibria(config, sin_override, d_override, out);
        if (sim->parsed()) return cmd_simulate(config, x0, tend, tol, out);
        if (bas->parsed()) return cmd_basin(config, bspec, budget, out);
        if (br->parsed()) return cmd_branch(config, free_param, from, to, d_override, out);
        if (cy->parsed())
            return cmd_cycles(config, d_override, from_hopf, seed_path, range_lo, range_hi, out);
        if (dg->parsed()) {
            Window win{window[0], window[1], window[2], window[3]};
            return cmd_diagram(config, win, grid_nn[0], grid_nn[1], slices, slice_band[0],
                               slice_band[1], out_dir);
        }
        if (rp->parsed()) return cmd_report(in_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
