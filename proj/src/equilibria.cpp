#include "mutbif/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "mutbif/cubic.hpp"

namespace mutbif {

namespace {

constexpr int kScanPoints = 2048;
constexpr int kRefine = 8;
constexpr double kResidualTol = 1e-12;
constexpr int kNewtonMax = 50;

double theta(int i, const ModelParams& p) { return p.removal_rate(i) / p.operating.D; }

/// Remaining equilibrium condition along gamma_1: with x1 = F_1(x2) and
/// S = S_in - th1 x1 - th2 x2 (so f_1 = D_1 holds by construction),
/// a coexistence equilibrium is a root of f_2(S, x1) - D_2.
/// Smooth and pole-free on the whole domain of F_1, unlike the composed
/// form F_2(F_1(x2)) - x2, whose zeros it shares.
double gamma1_residual(double x2, const ModelParams& p) {
    const double x1 = std::max(F_curve(1, x2, p), 0.0);
    const double S = p.operating.S_in - theta(1, p) * x1 - theta(2, p) * x2;
    return growth(2, std::max(S, 0.0), x1, p) - p.D2();
}

struct Reduced2 {
    // R(x1,x2) = (f1(S,x2)-D1, f2(S,x1)-D2), S = S_in - th1 x1 - th2 x2
    const ModelParams& p;
    double th1, th2;

    explicit Reduced2(const ModelParams& q) : p(q), th1(theta(1, q)), th2(theta(2, q)) {}

    bool eval(double x1, double x2, double r[2]) const {
        const double S = p.operating.S_in - th1 * x1 - th2 * x2;
        if (S <= 0 || x1 <= 0 || x2 <= 0) return false;
        r[0] = growth(1, S, x2, p) - p.D1();
        r[1] = growth(2, S, x1, p) - p.D2();
        return true;
    }
    void jac(double x1, double x2, double J[2][2]) const {
        const double S = p.operating.S_in - th1 * x1 - th2 * x2;
        const auto [E, G] = growth_partials(1, S, x2, p);
        const auto [F, H] = growth_partials(2, S, x1, p);
        J[0][0] = -th1 * E;
        J[0][1] = -th2 * E + G;
        J[1][0] = -th1 * F + H;
        J[1][1] = -th2 * F;
    }
    // returns residual norm at the converged point, or +inf
    double newton(double& x1, double& x2) const {
        for (int it = 0; it < kNewtonMax; ++it) {
            double r[2];
            if (!eval(x1, x2, r)) return HUGE_VAL;
            const double nr = std::max(std::abs(r[0]), std::abs(r[1]));
            if (nr < kResidualTol) return nr;
            double J[2][2];
            jac(x1, x2, J);
            const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            if (det == 0) return HUGE_VAL;
            const double d1 = (r[0] * J[1][1] - r[1] * J[0][1]) / det;
            const double d2 = (J[0][0] * r[1] - J[1][0] * r[0]) / det;
            x1 -= d1;
            x2 -= d2;
        }
        double r[2];
        if (!eval(x1, x2, r)) return HUGE_VAL;
        return std::max(std::abs(r[0]), std::abs(r[1]));
    }
};

State point_on_gamma1(double x2, const ModelParams& p) {
    const double x1 = F_curve(1, x2, p);
    return {p.operating.S_in - theta(1, p) * x1 - theta(2, p) * x2, x1, x2};
}

} // namespace

double phi(int i, double x_j, const ModelParams& p) {
    const int j = 3 - i;
    const double hi = p.operating.S_in / theta(j, p);
    if (x_j < -1e-14 || x_j > hi * (1 + 1e-14))
        throw std::domain_error("phi: argument outside [0, D S_in/D_j]");
    const double S = std::max(p.operating.S_in - theta(j, p) * x_j, 0.0);
    return growth(i, S, std::max(x_j, 0.0), p);
}

double phi_quadratic_discriminant(int i, const ModelParams& p) {
    const int j = 3 - i;
    const double tj = theta(j, p), K = p.growth.K(i), L = p.growth.L(i);
    const double Sin = p.operating.S_in;
    return tj * K * L * (K + Sin) * (tj * L + Sin);
}

std::optional<CurveDomain> phi_roots(int i, const ModelParams& p) {
    p.validate();
    const int j = 3 - i;
    const double tj = theta(j, p), K = p.growth.K(i), L = p.growth.L(i);
    const double Sin = p.operating.S_in, Di = p.removal_rate(i);
    const double hi = Sin / tj;
    if (!(hi > 0)) return std::nullopt;

    // phi_i' numerator: (tj^2 L - tj K) x^2 - 2 tj L (K+Sin) x + Sin L (K+Sin)
    const double qa = tj * tj * L - tj * K;
    const double qbh = -tj * L * (K + Sin);  // half of the linear coefficient
    const double qc = Sin * L * (K + Sin);
    const double disc = qbh * qbh - qa * qc;  // = tj K L (K+Sin)(tj L + Sin) > 0
    double x_max;
    if (std::abs(qa) < 1e-300) {
        x_max = -qc / (2 * qbh);
    } else {
        const double sq = std::sqrt(disc);
        const double r1 = (-qbh - sq) / qa, r2 = (-qbh + sq) / qa;
        // exactly one root lies inside (0, hi): phi rises from 0 and returns to 0
        x_max = (r1 > 0 && r1 < hi) ? r1 : r2;
    }
    if (!(x_max > 0 && x_max < hi)) return std::nullopt;
    if (phi(i, x_max, p) < Di) return std::nullopt;

    auto bisect = [&](double lo, double hi2) {
        double flo = phi(i, lo, p) - Di;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi2);
            const double fm = phi(i, mid, p) - Di;
            if ((flo <= 0) == (fm <= 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi2 = mid;
            }
            if (hi2 - lo < 1e-15 * (1 + std::abs(lo))) break;
        }
        return 0.5 * (lo + hi2);
    };
    CurveDomain d;
    d.x_lo = bisect(0.0, x_max);
    d.x_hi = bisect(x_max, hi);
    d.simplex_bound = hi;
    return d;
}

double F_curve(int i, double x_j, const ModelParams& p) {
    const int j = 3 - i;
    const double ti = theta(i, p), tj = theta(j, p);
    const double K = p.growth.K(i), L = p.growth.L(i), m = p.growth.m(i);
    const double Di = p.removal_rate(i), Sin = p.operating.S_in;
    // f_i = D_i is solvable for S > 0 exactly where (D_i - m_i) x_j + D_i L_i < 0
    if (!(std::abs(Di - m) < 1e-12 * m)) {
        if ((Di - m) * x_j + Di * L >= 0)
            throw std::domain_error("F_curve: rational form singular (f_i = D_i unsolvable here)");
        const double num = Di * (K + Sin - tj * x_j) * (L + x_j) - m * x_j * (Sin - tj * x_j);
        return num / (ti * ((Di - m) * x_j + Di * L));
    }
    // degenerate m_i = D_i: solve f_i = D_i implicitly for S, then invert (5)
    // f_i = D_i  <=>  m S x/(K+S)(L+x) = D_i  =>  S = K D_i (L+x)/(m x - D_i (L+x))
    const double denom = m * x_j - Di * (L + x_j);
    if (denom <= 0) throw std::domain_error("F_curve: f_i = D_i unsolvable (degenerate case)");
    const double S = K * Di * (L + x_j) / denom;
    return (Sin - S - tj * x_j) / ti;
}

double F_curve_deriv(int i, double x_j, const ModelParams& p) {
    const int j = 3 - i;
    const double ti = theta(i, p), tj = theta(j, p);
    const double K = p.growth.K(i), L = p.growth.L(i), m = p.growth.m(i);
    const double Di = p.removal_rate(i);
    const double q = (Di - m) * x_j + Di * L;
    if (q == 0) throw std::domain_error("F_curve_deriv: rational form singular");
    const double num = -tj * (Di - m) * (Di - m) * x_j * x_j
                       - 2 * tj * Di * L * (Di - m) * x_j
                       + Di * L * (m * K - Di * tj * L);
    return num / (ti * q * q);
}

double F_curve_deriv_partials(int i, double x_j, const ModelParams& p) {
    const double xi = F_curve(i, x_j, p);
    const double x1 = (i == 1) ? xi : x_j;
    const double x2 = (i == 1) ? x_j : xi;
    const double S = p.operating.S_in - theta(1, p) * x1 - theta(2, p) * x2;
    const double D = p.operating.D;
    if (i == 1) {
        const auto [E, G] = growth_partials(1, S, x2, p);
        return (-p.D2() * E + D * G) / (p.D1() * E);
    }
    const auto [F, H] = growth_partials(2, S, x1, p);
    return (-p.D1() * F + D * H) / (p.D2() * F);
}

double slope_product(const State& y, const ModelParams& p) {
    const double D = p.operating.D;
    const auto [E, G] = growth_partials(1, y.S, y.x2, p);
    const auto [F, H] = growth_partials(2, y.S, y.x1, p);
    const double F1p = (-p.D2() * E + D * G) / (p.D1() * E);
    const double F2p = (-p.D1() * F + D * H) / (p.D2() * F);
    return F1p * F2p;
}

RouthHurwitz routh_hurwitz(const State& y, const ModelParams& p) {
    const auto [E, G] = growth_partials(1, y.S, y.x2, p);
    const auto [F, H] = growth_partials(2, y.S, y.x1, p);
    const double D = p.operating.D, D1 = p.D1(), D2 = p.D2();
    const double x1 = y.x1, x2 = y.x2;
    RouthHurwitz rh;
    rh.c1 = D + E * x1 + F * x2;
    rh.c2 = D1 * E * x1 + D2 * F * x2 + (F * G + E * H - G * H) * x1 * x2;
    rh.c3 = (D1 * F * G + D2 * E * H - D * G * H) * x1 * x2;
    rh.c4 = rh.c1 * rh.c2 - rh.c3;
    return rh;
}

std::vector<Equilibrium> find_coexistence(const ModelParams& p) {
    p.validate();
    std::vector<Equilibrium> out;
    const auto dom1 = phi_roots(1, p);
    const auto dom2 = phi_roots(2, p);
    if (!dom1 || !dom2) return out;

    Reduced2 sys(p);
    struct Raw {
        double x1, x2;
        bool critical;
    };
    std::vector<Raw> raw;

    const double a = dom1->x_lo, b = dom1->x_hi;
    const double h = (b - a) / kScanPoints;
    double prev = gamma1_residual(a, p);
    double prev_x = a;
    double before_prev = prev;
    for (int k = 1; k <= kScanPoints; ++k) {
        const double x = (k == kScanPoints) ? b : a + k * h;
        const double g = gamma1_residual(x, p);
        if ((prev <= 0) != (g <= 0)) {
            // refine the bracket x8, then bisect
            double lo = prev_x, hi2 = x, flo = prev;
            for (int r = 0; r < kRefine; ++r) {
                const double mid = 0.5 * (lo + hi2);
                const double fm = gamma1_residual(mid, p);
                if ((flo <= 0) == (fm <= 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi2 = mid;
                }
            }
            for (int it = 0; it < 120 && hi2 - lo > 1e-15 * (1 + std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi2);
                const double fm = gamma1_residual(mid, p);
                if ((flo <= 0) == (fm <= 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi2 = mid;
                }
            }
            const double x2r = 0.5 * (lo + hi2);
            double x1r = F_curve(1, x2r, p), x2n = x2r;
            if (sys.newton(x1r, x2n) < 1e-9) raw.push_back({x1r, x2n, false});
        } else if (k >= 2) {
            // near-tangent double root: local |g| minimum that Newton accepts
            if (std::abs(prev) < std::abs(before_prev) && std::abs(prev) < std::abs(g) &&
                std::abs(prev) < 1e-8) {
                double x1r = F_curve(1, prev_x, p), x2n = prev_x;
                if (sys.newton(x1r, x2n) < kResidualTol) raw.push_back({x1r, x2n, true});
            }
        }
        before_prev = prev;
        prev = g;
        prev_x = x;
    }

    // deduplicate (tangency polish can reproduce a neighbour root)
    std::vector<Raw> uniq;
    for (auto& r : raw) {
        bool dup = false;
        for (auto& u : uniq)
            if (std::abs(u.x1 - r.x1) + std::abs(u.x2 - r.x2) < 1e-8) dup = true;
        if (!dup) uniq.push_back(r);
    }

    const double th1 = theta(1, p), th2 = theta(2, p);
    for (auto& r : uniq) {
        const double S = p.operating.S_in - th1 * r.x1 - th2 * r.x2;
        if (!(S > 0 && r.x1 > 0 && r.x2 > 0)) continue;
        Equilibrium eq;
        eq.state = {S, r.x1, r.x2};
        eq.kind = EquilibriumKind::coexistence;
        eq.critical = r.critical;
        out.push_back(classify(eq, p));
    }
    std::sort(out.begin(), out.end(),
              [](const Equilibrium& u, const Equilibrium& v) { return u.state.S < v.state.S; });
    return out;
}

Equilibrium classify(Equilibrium eq, const ModelParams& p) {
    if (eq.kind == EquilibriumKind::washout) {
        eq.eigenvalues = {-p.operating.D, -p.D1(), -p.D2()};
        eq.stability = Stability::les;
        eq.rh = {};
        return eq;
    }
    eq.rh = routh_hurwitz(eq.state, p);
    eq.eigenvalues = cubic_roots(eq.rh.c1, eq.rh.c2, eq.rh.c3);
    eq.stability = (eq.rh.c3 > 0 && eq.rh.c4 > 0) ? Stability::les : Stability::unstable;
    return eq;
}

Equilibrium washout_equilibrium(const ModelParams& p) {
    Equilibrium eq;
    eq.state = {p.operating.S_in, 0.0, 0.0};
    eq.kind = EquilibriumKind::washout;
    return classify(eq, p);
}

RegionTag reduced_region(double x1, double x2, const ModelParams& p) {
    if (p.removal.a1 != 0 || p.removal.a2 != 0 || p.removal.alpha1 != 1 || p.removal.alpha2 != 1)
        throw std::domain_error("reduced_region: defined for the no-mortality case only");
    const double S = p.operating.S_in - x1 - x2;
    if (S < 0) throw std::domain_error("reduced_region: point outside M");
    const double D = p.operating.D;
    const double u1 = growth(1, S, x2, p) - D;
    const double u2 = growth(2, S, x1, p) - D;
    const double tol = 1e-12 * (1 + D);
    if (std::abs(u1) < tol || std::abs(u2) < tol) return RegionTag::on_curve;
    if (u1 < 0 && u2 > 0) return RegionTag::I;
    if (u1 < 0 && u2 < 0) return RegionTag::II;
    if (u1 > 0 && u2 < 0) return RegionTag::III;
    return RegionTag::IV;
}

std::vector<State> coexistence_grid_oracle(const ModelParams& p, int n) {
    Reduced2 sys(p);
    const double th1 = theta(1, p), th2 = theta(2, p);
    const double b1 = p.operating.S_in / th1, b2 = p.operating.S_in / th2;
    std::vector<State> found;
    for (int i = 1; i < n; ++i) {
        for (int j = 1; j < n; ++j) {
            double x1 = b1 * i / n, x2 = b2 * j / n;
            if (th1 * x1 + th2 * x2 >= p.operating.S_in) continue;
            if (sys.newton(x1, x2) >= kResidualTol) continue;
            const double S = p.operating.S_in - th1 * x1 - th2 * x2;
            if (!(S > 0 && x1 > 1e-12 && x2 > 1e-12)) continue;
            State s{S, x1, x2};
            bool dup = false;
            for (auto& f : found)
                if (distance(f, s) < 1e-8) dup = true;
            if (!dup) found.push_back(s);
        }
    }
    std::sort(found.begin(), found.end(), [](const State& u, const State& v) { return u.S < v.S; });
    return found;
}

} // namespace mutbif
