#include "mutbif/model.hpp"

#include <cmath>

namespace mutbif {

void ModelParams::validate() const {
    auto bad = [](const std::string& msg) { throw std::domain_error("ModelParams: " + msg); };
    for (int i = 1; i <= 2; ++i) {
        if (!(growth.m(i) > 0) || !(growth.K(i) > 0) || !(growth.L(i) > 0))
            bad("growth parameters must be strictly positive");
        if (removal.alpha(i) < 0 || removal.alpha(i) > 1) bad("alpha_i must lie in [0,1]");
        if (removal.a(i) < 0) bad("mortality a_i must be nonnegative");
    }
    if (!(operating.D > 0)) bad("dilution rate D must be positive");
    if (operating.S_in < 0) bad("S_in must be nonnegative");
    if (!(D1() > 0) || !(D2() > 0)) bad("removal rates D_i must be positive (alpha_i = a_i = 0 rejected)");
}

double growth(int i, double S, double x_partner, const ModelParams& p) {
    if (S < 0 || x_partner < 0) throw std::domain_error("growth: negative concentration");
    const double m = p.growth.m(i), K = p.growth.K(i), L = p.growth.L(i);
    return m * S / (K + S) * x_partner / (L + x_partner);
}

GrowthPartials growth_partials(int i, double S, double x_partner, const ModelParams& p) {
    if (S < 0 || x_partner < 0) throw std::domain_error("growth_partials: negative concentration");
    const double m = p.growth.m(i), K = p.growth.K(i), L = p.growth.L(i);
    const double KS = K + S, Lx = L + x_partner;
    return {m * K / (KS * KS) * x_partner / Lx, m * S / KS * L / (Lx * Lx)};
}

State rhs(const State& y, const ModelParams& p) {
    const double f1 = growth(1, y.S, y.x2, p);
    const double f2 = growth(2, y.S, y.x1, p);
    return {p.operating.D * (p.operating.S_in - y.S) - f1 * y.x1 - f2 * y.x2,
            (f1 - p.D1()) * y.x1,
            (f2 - p.D2()) * y.x2};
}

Eigen::Matrix3d jacobian(const State& y, const ModelParams& p) {
    const double f1 = growth(1, y.S, y.x2, p);
    const double f2 = growth(2, y.S, y.x1, p);
    const auto [E, G] = growth_partials(1, y.S, y.x2, p);
    const auto [F, H] = growth_partials(2, y.S, y.x1, p);
    Eigen::Matrix3d J;
    J << -p.operating.D - E * y.x1 - F * y.x2, -f1 - H * y.x2, -f2 - G * y.x1,
         E * y.x1,                             f1 - p.D1(),   G * y.x1,
         F * y.x2,                             H * y.x2,      f2 - p.D2();
    return J;
}

double omega_bound(const ModelParams& p) {
    p.validate();
    return p.operating.D * p.operating.S_in / p.D_min();
}

} // namespace mutbif
