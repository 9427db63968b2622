#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mutbif/dynamics.hpp"

using namespace mutbif;

TEST_CASE("washout initial condition stays put") {
    ModelParams p = default_params();
    const Trajectory tr = integrate({p.operating.S_in, 0.0, 0.0}, p, 50.0, 1e-10);
    for (const auto& y : tr.y) {
        CHECK(y.x1 == 0.0);
        CHECK(y.x2 == 0.0);
        CHECK(y.S == doctest::Approx(p.operating.S_in).epsilon(1e-9));
    }
}

TEST_CASE("omega set is forward invariant") {
    ModelParams p = default_params();
    const double bound = omega_bound(p);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 40; ++k) {
        // random point inside the simplex
        double a = u(rng), b = u(rng), c = u(rng);
        const double s = a + b + c + 1e-9;
        const State init{0.98 * bound * a / s, 0.98 * bound * b / s, 0.98 * bound * c / s};
        const Trajectory tr = integrate(init, p, 200.0, 1e-8);
        for (const auto& y : tr.y) {
            CHECK(y.S + y.x1 + y.x2 <= bound * (1 + 1e-6));
            CHECK(y.S >= 0.0);
            CHECK(y.x1 >= 0.0);
            CHECK(y.x2 >= 0.0);
        }
    }
}

TEST_CASE("no-mortality total mass relaxes like the scalar ODE") {
    ModelParams p = no_mortality_params().with_S_in(0.5);
    const State init{0.3, 0.05, 0.08};
    const double z0 = init.S + init.x1 + init.x2;
    const Trajectory tr = integrate(init, p, 60.0, 1e-10, 0.25);
    for (size_t k = 0; k < tr.t.size(); ++k) {
        const double z = tr.y[k].S + tr.y[k].x1 + tr.y[k].x2;
        const double expect =
            p.operating.S_in + (z0 - p.operating.S_in) * std::exp(-p.operating.D * tr.t[k]);
        CHECK(std::abs(z - expect) < 1e-6);
    }
}

TEST_CASE("region-II trajectories decrease in both species when no equilibrium exists") {
    ModelParams p = no_mortality_params().with_S_in(0.12);  // below the fold at 0.16875
    REQUIRE(find_coexistence(p).empty());
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.1, 0.4);
    for (int k = 0; k < 10; ++k) {
        double x1 = u(rng) * p.operating.S_in, x2 = u(rng) * p.operating.S_in;
        if (reduced_region(x1, x2, p) != RegionTag::II) continue;
        const State init{p.operating.S_in - x1 - x2, x1, x2};
        const Trajectory tr = integrate(init, p, 40.0, 1e-9, 1.0);
        for (size_t i = 1; i < tr.y.size(); ++i) {
            CHECK(tr.y[i].x1 <= tr.y[i - 1].x1 * (1 + 1e-9));
            CHECK(tr.y[i].x2 <= tr.y[i - 1].x2 * (1 + 1e-9));
        }
    }
}

TEST_CASE("attractor classification: washout basin") {
    ModelParams p = default_params().with_S_in(2.0);  // region with washout only
    REQUIRE(find_coexistence(p).empty());
    const AttractorLabel lab = classify_attractor({1.0, 0.3, 0.3}, p, 2000.0);
    CHECK(lab.kind == AttractorLabel::Kind::equilibrium);
    CHECK(lab.equilibrium_index == 0);
}

TEST_CASE("attractor classification: stable cycle at D=0.195") {
    // region (sigma3, sigma4): bistability of washout and the Hopf cycle
    ModelParams p = default_params().with_D(0.195).with_S_in(3.285);
    const AttractorLabel lab = classify_attractor({0.34, 0.25, 0.20}, p, 3000.0);
    CHECK(lab.kind == AttractorLabel::Kind::cycle);
    CHECK(lab.period > 5.0);
    CHECK(lab.period < 40.0);
    // label independent of tolerance refinement
    std::vector<Equilibrium> known;
    known.push_back(washout_equilibrium(p));
    for (auto& e : find_coexistence(p)) known.push_back(e);
    const AttractorLabel lab10 = classify_attractor({0.34, 0.25, 0.20}, p, 3000.0, known, 1e-10);
    CHECK(lab10.kind == AttractorLabel::Kind::cycle);
    CHECK(lab10.period == doctest::Approx(lab.period).epsilon(1e-3));
}

TEST_CASE("basin map in a washout-only region is uniform") {
    ModelParams p = no_mortality_params().with_S_in(0.1);
    BasinSpec spec;
    spec.n1 = spec.n2 = 5;
    const BasinMap map = basin_map(spec, p, 1500.0);
    for (const auto& lab : map.labels) {
        CHECK(lab.kind == AttractorLabel::Kind::equilibrium);
        CHECK(lab.equilibrium_index == 0);
    }
}

TEST_CASE("bistability labels at D=0.23 above the homoclinic") {
    // (sigma3, +inf): washout and E1* both attract
    ModelParams p = default_params().with_D(0.23).with_S_in(3.4);
    const auto eqs = find_coexistence(p);
    REQUIRE(eqs.size() == 2);
    REQUIRE(eqs[0].stability == Stability::les);
    std::vector<Equilibrium> known;
    known.push_back(washout_equilibrium(p));
    for (auto& e : eqs) known.push_back(e);
    const AttractorLabel a = classify_attractor({0.1, 0.02, 0.02}, p, 3000.0, known, 1e-8);
    CHECK(a.kind == AttractorLabel::Kind::equilibrium);
    CHECK(a.equilibrium_index == 0);
    const AttractorLabel b =
        classify_attractor({eqs[0].state.S, eqs[0].state.x1 * 1.05, eqs[0].state.x2}, p, 3000.0,
                           known, 1e-8);
    CHECK(b.kind == AttractorLabel::Kind::equilibrium);
    CHECK(b.equilibrium_index == 1);
}
