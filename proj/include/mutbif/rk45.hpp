#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace mutbif {

/// Raised when the adaptive step shrinks below machine resolution
/// (stiffness or an unreachable tolerance).
class StepSizeUnderflow : public std::runtime_error {
  public:
    explicit StepSizeUnderflow(double t)
        : std::runtime_error("dopri5: step size underflow at t = " + std::to_string(t)) {}
};

struct OdeStats {
    long steps = 0;
    long rejected = 0;
};

/// Quartic continuous extension over one accepted step of dopri5.
class DenseSegment {
  public:
    DenseSegment(int n, const double* r, double t_old, double h)
        : n_(n), r_(r), t_old_(t_old), h_(h) {}

    void eval(double t, double* out) const {
        const double th = (t - t_old_) / h_, th1 = 1.0 - th;
        for (int i = 0; i < n_; ++i) {
            out[i] = r_[i] + th * (r_[n_ + i] +
                     th1 * (r_[2 * n_ + i] + th * (r_[3 * n_ + i] + th1 * r_[4 * n_ + i])));
        }
    }
    double t_begin() const { return t_old_; }
    double t_end() const { return t_old_ + h_; }

  private:
    int n_;
    const double* r_;
    double t_old_, h_;
};

/// Dormand-Prince 5(4) with PI step control and dense output.
/// After every accepted step the observer is called as
///   bool obs(double t_old, double t_new, double* y, const DenseSegment& d)
/// and may mutate y (the FSAL stage is refreshed); returning false stops the
/// integration early. Relative and absolute tolerances are per-component
/// with scale atol + rtol*max(|y_old|,|y_new|).
template <class F, class Obs>
double dopri5(F&& f, int n, double t0, double t1, double* y, double rtol, double atol,
              OdeStats* stats, Obs&& obs, double h_init = 0.0) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    static constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    static constexpr double fac_min = 0.2, fac_max = 10.0;
    static constexpr double uround = 2.3e-16;

    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    std::vector<double> buf(10 * n);
    double* k1 = buf.data();
    double* k2 = k1 + n;
    double* k3 = k2 + n;
    double* k4 = k3 + n;
    double* k5 = k4 + n;
    double* k6 = k5 + n;
    double* k7 = k6 + n;
    double* yt = k7 + n;
    double* y1 = yt + n;
    std::vector<double> rcont(5 * n);

    double t = t0;
    f(t, y, k1);

    double h = h_init;
    if (h == 0.0) {
        // crude start: scale against the initial derivative, then cap
        double dn = 0, yn = 0;
        for (int i = 0; i < n; ++i) {
            const double sc = atol + rtol * std::abs(y[i]);
            dn += (k1[i] / sc) * (k1[i] / sc);
            yn += (y[i] / sc) * (y[i] / sc);
        }
        h = (dn > 0) ? 0.01 * std::sqrt(yn / dn) : 1e-6;
        h = std::min(std::max(h, 1e-8), std::abs(t1 - t0));
        if (h == 0.0) h = 1e-8;
    }
    h *= dir;

    double facold = 1e-4;
    bool last = false;
    while (!last) {
        if (std::abs(h) <= std::abs(t) * uround * 10 + 1e-300)
            throw StepSizeUnderflow(t);
        if ((t + h - t1) * dir >= 0.0) {
            h = t1 - t;
            last = true;
        }

        auto stage = [&](double* k, double c, auto... aw) {
            // yt = y + h * sum(a*kprev)
            const double as[] = {aw...};
            const double* ks[] = {k1, k2, k3, k4, k5, k6};
            for (int i = 0; i < n; ++i) {
                double s = 0;
                for (size_t j = 0; j < sizeof...(aw); ++j) s += as[j] * ks[j][i];
                yt[i] = y[i] + h * s;
            }
            f(t + c * h, yt, k);
        };
        stage(k2, c2, a21);
        stage(k3, c3, a31, a32);
        stage(k4, c4, a41, a42, a43);
        stage(k5, c5, a51, a52, a53, a54);
        stage(k6, 1.0, a61, a62, a63, a64, a65);
        for (int i = 0; i < n; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(t + h, y1, k7);

        double err = 0;
        for (int i = 0; i < n; ++i) {
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / n);

        if (stats) ++stats->steps;
        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            // dense coefficients before y is overwritten
            for (int i = 0; i < n; ++i) {
                const double yd = y1[i] - y[i];
                const double bspl = h * k1[i] - yd;
                rcont[i] = y[i];
                rcont[n + i] = yd;
                rcont[2 * n + i] = bspl;
                rcont[3 * n + i] = yd - h * k7[i] - bspl;
                rcont[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                        d6 * k6[i] + d7 * k7[i]);
            }
            const double t_old = t;
            t += h;
            std::memcpy(y, y1, n * sizeof(double));
            std::memcpy(k1, k7, n * sizeof(double));  // FSAL
            DenseSegment dense(n, rcont.data(), t_old, h);
            if (!obs(t_old, t, y, dense)) return t;
            if (std::memcmp(y, y1, n * sizeof(double)) != 0) f(t, y, k1);

            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(1.0 / fac_max, std::min(1.0 / fac_min, fac / safe));
            h = h / fac;
        } else {
            if (stats) ++stats->rejected;
            h = h / std::min(1.0 / fac_min, fac11 / safe);
            last = false;
        }
    }
    return t;
}

struct NoObserver {
    bool operator()(double, double, double*, const DenseSegment&) const { return true; }
};

template <class F>
void dopri5(F&& f, int n, double t0, double t1, double* y, double rtol, double atol,
            OdeStats* stats = nullptr) {
    dopri5(std::forward<F>(f), n, t0, t1, y, rtol, atol, stats, NoObserver{});
}

} // namespace mutbif
