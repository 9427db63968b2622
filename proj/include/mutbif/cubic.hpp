#pragma once

#include <array>
#include <complex>

namespace mutbif {

/// Roots of x^3 + a x^2 + b x + c with real coefficients.
/// Closed-form (trigonometric / Cardano) evaluation followed by a Newton
/// polish on each root. Either all three roots are real or the second and
/// third form a conjugate pair (returned as mu + i nu, mu - i nu).
std::array<std::complex<double>, 3> cubic_roots(double a, double b, double c);

/// Same for an arbitrary 3x3 real matrix via its characteristic polynomial.
template <class Mat3>
std::array<std::complex<double>, 3> eigenvalues3(const Mat3& M) {
    const double tr = M(0, 0) + M(1, 1) + M(2, 2);
    const double m2 = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0) +
                      M(0, 0) * M(2, 2) - M(0, 2) * M(2, 0) +
                      M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1);
    const double det = M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
                       M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
                       M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
    return cubic_roots(-tr, m2, -det);
}

} // namespace mutbif
