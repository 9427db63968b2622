#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mutbif {

/// Growth-law constants for both species: maximum rate m_i, substrate
/// half-saturation K_i and partner half-saturation L_i. All strictly positive.
struct GrowthParams {
    double m1 = 4.0, K1 = 0.2, L1 = 0.3;
    double m2 = 4.0, K2 = 0.1, L2 = 0.2;

    double m(int i) const { return i == 1 ? m1 : m2; }
    double K(int i) const { return i == 1 ? K1 : K2; }
    double L(int i) const { return i == 1 ? L1 : L2; }
};

/// Per-species removal law D_i = alpha_i * D + a_i.
struct RemovalParams {
    double alpha1 = 1.0, alpha2 = 1.0;
    double a1 = 0.8, a2 = 1.5;

    double alpha(int i) const { return i == 1 ? alpha1 : alpha2; }
    double a(int i) const { return i == 1 ? a1 : a2; }
};

/// Operating (control) parameters: feed concentration and dilution rate.
struct OperatingParams {
    double S_in = 3.0;
    double D = 0.2;
};

/// Immutable parameter bundle. Removal rates D_i are derived on access.
struct ModelParams {
    GrowthParams growth;
    RemovalParams removal;
    OperatingParams operating;

    double removal_rate(int i) const {
        return removal.alpha(i) * operating.D + removal.a(i);
    }
    double D1() const { return removal_rate(1); }
    double D2() const { return removal_rate(2); }
    double D_min() const {
        double d = operating.D;
        if (D1() < d) d = D1();
        if (D2() < d) d = D2();
        return d;
    }

    /// Throws std::domain_error on any violated parameter invariant.
    /// D_i = 0 (alpha_i = 0 with a_i = 0) is rejected: the dissipativity
    /// bound D*S_in/D_min degenerates there.
    void validate() const;

    ModelParams with_S_in(double s) const {
        ModelParams q = *this;
        q.operating.S_in = s;
        return q;
    }
    ModelParams with_D(double d) const {
        ModelParams q = *this;
        q.operating.D = d;
        return q;
    }
};

/// Base parameter set used throughout: m=(4,4), K=(0.2,0.1), L=(0.3,0.2),
/// alpha=(1,1), a=(0.8,1.5).
inline ModelParams default_params() { return ModelParams{}; }

/// Same biology with mortality switched off (D_1 = D_2 = D).
inline ModelParams no_mortality_params() {
    ModelParams p;
    p.removal.a1 = 0.0;
    p.removal.a2 = 0.0;
    return p;
}

struct State {
    double S = 0.0, x1 = 0.0, x2 = 0.0;

    double operator[](int k) const { return k == 0 ? S : (k == 1 ? x1 : x2); }
    double& operator[](int k) { return k == 0 ? S : (k == 1 ? x1 : x2); }
};

inline double distance(const State& a, const State& b) {
    double dS = a.S - b.S, d1 = a.x1 - b.x1, d2 = a.x2 - b.x2;
    return std::sqrt(dS * dS + d1 * d1 + d2 * d2);
}

/// Flat TOML config: keys m1,K1,L1,m2,K2,L2,alpha1,alpha2,a1,a2,S_in,D.
/// Missing keys keep their defaults; unknown keys are an error.
ModelParams load_params(const std::string& path);
void save_params(const ModelParams& p, const std::string& path);

} // namespace mutbif
