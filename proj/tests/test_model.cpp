#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mutbif/model.hpp"

using namespace mutbif;

TEST_CASE("growth law evaluates the Monod-type product") {
    ModelParams p = default_params();
    CHECK(growth(1, 0.0, 5.0, p) == 0.0);
    CHECK(growth(2, 3.0, 0.0, p) == 0.0);
    // m1 S/(K1+S) * x2/(L1+x2) at S=0.2, x2=0.3: 4 * 1/2 * 1/2
    CHECK(growth(1, 0.2, 0.3, p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(growth(1, -0.1, 0.3, p), std::domain_error);
}

TEST_CASE("growth stays below m_i and is monotone in both arguments") {
    ModelParams p = default_params();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int k = 0; k < 500; ++k) {
        const double S = u(rng), x = u(rng);
        for (int i = 1; i <= 2; ++i) {
            const double f = growth(i, S, x, p);
            CHECK(f >= 0.0);
            CHECK(f < p.growth.m(i));
            if (S > 0 && x > 0) {
                const auto g = growth_partials(i, S, x, p);
                CHECK(g.dS > 0.0);
                CHECK(g.dx > 0.0);
            }
        }
        // the hypotheses' boundary cases
        CHECK(growth(1, 0.0, x, p) == 0.0);
        CHECK(growth(1, S, 0.0, p) == 0.0);
        CHECK(growth_partials(1, 0.0, x, p).dx == 0.0);
    }
}

TEST_CASE("analytic growth partials match finite differences") {
    ModelParams p = default_params();
    CHECK(growth_partials(1, 0.2, 0.3, p).dS == doctest::Approx(2.5).epsilon(1e-12));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.01, 8.0);
    for (int k = 0; k < 200; ++k) {
        const double S = u(rng), x = u(rng);
        for (int i = 1; i <= 2; ++i) {
            const auto g = growth_partials(i, S, x, p);
            const double h = 1e-6 * (1 + S);
            const double fdS = (growth(i, S + h, x, p) - growth(i, S - h, x, p)) / (2 * h);
            const double hx = 1e-6 * (1 + x);
            const double fdx = (growth(i, S, x + hx, p) - growth(i, S, x - hx, p)) / (2 * hx);
            CHECK(g.dS == doctest::Approx(fdS).epsilon(1e-6));
            CHECK(g.dx == doctest::Approx(fdx).epsilon(1e-6));
        }
    }
}

TEST_CASE("washout is an equilibrium for any parameters") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 4.0);
    for (int k = 0; k < 100; ++k) {
        ModelParams p = default_params();
        p.growth.m1 = u(rng);
        p.growth.K2 = u(rng);
        p.operating.S_in = u(rng);
        p.operating.D = u(rng);
        const State v = rhs({p.operating.S_in, 0.0, 0.0}, p);
        CHECK(v.S == 0.0);
        CHECK(v.x1 == 0.0);
        CHECK(v.x2 == 0.0);
    }
}

TEST_CASE("rhs vanishes at the tabulated fold state") {
    // LP equilibrium at D=0.2 from the one-parameter table, digits as printed
    ModelParams p = default_params().with_S_in(2.8504);
    const State v = rhs({0.665, 0.191, 0.144}, p);
    const double n = std::sqrt(v.S * v.S + v.x1 * v.x1 + v.x2 * v.x2);
    CHECK(n < 1e-2);
}

TEST_CASE("boundary faces are invariant") {
    ModelParams p = default_params();
    CHECK(rhs({1.0, 0.0, 0.5}, p).x1 == 0.0);
    CHECK(rhs({1.0, 0.5, 0.0}, p).x2 == 0.0);
}

TEST_CASE("jacobian at washout is diagonal with removal rates") {
    ModelParams p = default_params().with_S_in(3.0);  // D=0.2, a=(0.8,1.5)
    const Eigen::Matrix3d J = jacobian({3.0, 0.0, 0.0}, p);
    CHECK(J(0, 0) == doctest::Approx(-0.2));
    CHECK(J(1, 1) == doctest::Approx(-1.0));
    CHECK(J(2, 2) == doctest::Approx(-1.7));
    CHECK(std::abs(J(0, 1)) + std::abs(J(0, 2)) + std::abs(J(1, 0)) + std::abs(J(1, 2)) +
              std::abs(J(2, 0)) + std::abs(J(2, 1)) ==
          doctest::Approx(0.0));
}

TEST_CASE("analytic jacobian matches finite differences at interior points") {
    ModelParams p = default_params();
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(0.02, 2.0);
    for (int k = 0; k < 100; ++k) {
        const State y{u(rng), u(rng), u(rng)};
        const Eigen::Matrix3d J = jacobian(y, p);
        Eigen::Matrix3d Jfd;
        for (int c = 0; c < 3; ++c) {
            State yp = y, ym = y;
            const double h = 1e-6 * (1 + std::abs(y[c]));
            yp[c] += h;
            ym[c] -= h;
            const State fp = rhs(yp, p), fm = rhs(ym, p);
            for (int r = 0; r < 3; ++r) Jfd(r, c) = (fp[r] - fm[r]) / (2 * h);
        }
        CHECK((J - Jfd).norm() / (1 + J.norm()) < 1e-6);
    }
}

TEST_CASE("omega bound") {
    ModelParams nm = no_mortality_params();
    CHECK(omega_bound(nm) == doctest::Approx(nm.operating.S_in));
    ModelParams p = default_params();
    CHECK(p.D1() == doctest::Approx(1.0));
    CHECK(p.D2() == doctest::Approx(1.7));
    CHECK(omega_bound(p) == doctest::Approx(3.0));  // D_min = D = 0.2
}

TEST_CASE("parameter validation rejects degenerate removal") {
    ModelParams p = default_params();
    p.removal.alpha1 = 0.0;
    p.removal.a1 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    ModelParams q = default_params();
    q.operating.D = 0.0;
    CHECK_THROWS_AS(q.validate(), std::domain_error);
}

TEST_CASE("config round trip") {
    ModelParams p = default_params();
    p.operating.S_in = 3.25;
    p.removal.a2 = 0.75;
    save_params(p, "test_config_roundtrip.toml");
    const ModelParams q = load_params("test_config_roundtrip.toml");
    CHECK(q.operating.S_in == doctest::Approx(3.25));
    CHECK(q.removal.a2 == doctest::Approx(0.75));
    CHECK(q.growth.K2 == doctest::Approx(0.1));
}
