#include "mutbif/cubic.hpp"

#include <algorithm>
#include <cmath>

namespace mutbif {

namespace {

std::complex<double> polish(std::complex<double> z, double a, double b, double c) {
    for (int it = 0; it < 3; ++it) {
        const auto f = ((z + a) * z + b) * z + c;
        const auto df = (3.0 * z + 2.0 * a) * z + b;
        if (std::abs(df) == 0.0) break;
        const auto dz = f / df;
        z -= dz;
        if (std::abs(dz) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
}

} // namespace

std::array<std::complex<double>, 3> cubic_roots(double a, double b, double c) {
    // depressed form t^3 + p t + q, x = t - a/3
    const double s = a / 3.0;
    const double p = b - a * a / 3.0;
    const double q = c + a * (2.0 * a * a - 9.0 * b) / 27.0;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;

    std::array<std::complex<double>, 3> r;
    if (disc >= 0.0 && p < 0.0) {
        // three real roots
        const double rho = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * rho);
        arg = std::clamp(arg, -1.0, 1.0);
        const double th = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            r[k] = rho * std::cos(th - 2.0 * M_PI * k / 3.0) - s;
        std::sort(r.begin(), r.end(),
                  [](const auto& u, const auto& v) { return u.real() < v.real(); });
    } else {
        // one real root by Cardano, conjugate pair by deflation
        const double half = q / 2.0;
        const double rad = half * half + p * p * p / 27.0;
        double t0;
        if (rad >= 0.0) {
            const double sq = std::sqrt(rad);
            t0 = std::cbrt(-half + sq) + std::cbrt(-half - sq);
        } else {
            const double rho = 2.0 * std::sqrt(-p / 3.0);
            const double th = std::acos(std::clamp(3.0 * q / (p * rho), -1.0, 1.0)) / 3.0;
            t0 = rho * std::cos(th);
        }
        double x0 = t0 - s;
        x0 = polish(x0, a, b, c).real();
        // x^3 + a x^2 + b x + c = (x - x0)(x^2 + B x + C)
        const double B = a + x0;
        const double C = b + x0 * B;
        const double d = B * B - 4.0 * C;
        r[0] = x0;
        if (d >= 0.0) {
            const double sq = std::sqrt(d);
            const double u = (B >= 0) ? (-B - sq) / 2.0 : (-B + sq) / 2.0;
            r[1] = u;
            r[2] = (u != 0.0) ? C / u : -B - u;
        } else {
            const double nu = std::sqrt(-d) / 2.0;
            r[1] = {-B / 2.0, nu};
            r[2] = {-B / 2.0, -nu};
        }
    }
    for (auto& z : r) z = polish(z, a, b, c);
    // re-pair conjugates after polishing
    if (std::abs(r[1].imag()) > 0 || std::abs(r[2].imag()) > 0) {
        if (std::abs(r[0].imag()) > std::abs(r[1].imag())) std::swap(r[0], r[1]);
        if (std::abs(r[0].imag()) > std::abs(r[2].imag())) std::swap(r[0], r[2]);
        r[0] = r[0].real();
        const std::complex<double> z = (r[1].imag() >= 0) ? r[1] : r[2];
        r[1] = z;
        r[2] = std::conj(z);
    }
    return r;
}

} // namespace mutbif
