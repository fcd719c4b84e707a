#pragma once

#include <array>
#include <complex>

// Euler-Maclaurin end corrections for momentum sums cut at a fold
// boundary, where the trapezoid rule alone is only second order.

namespace qrm::detail {

/// Amplitude and its first three momentum derivatives at one point.
using EdgeJet = std::array<std::complex<double>, 4>;

/// Probability to move from the band below an edge to the band above it.
inline double upward_transfer(const EdgeJet& a, double h)
{
    const double rho1 = 2.0 * std::real(std::conj(a[0]) * a[1]);
    const double rho3 = 2.0 * std::real(std::conj(a[0]) * a[3] + 3.0 * std::conj(a[1]) * a[2]);
    const double h2 = h * h;
    return h2 / 12.0 * rho1 - h2 * h2 / 720.0 * rho3;
}

/// Correction to the trapezoid sum of conj(a(q)) b(q) between two ends.
inline std::complex<double> product_end_correction(const EdgeJet& a_lo, const EdgeJet& b_lo, const EdgeJet& a_hi,
                                                   const EdgeJet& b_hi, double h)
{
    auto slope = [](const EdgeJet& a, const EdgeJet& b) { return std::conj(a[1]) * b[0] + std::conj(a[0]) * b[1]; };
    auto third = [](const EdgeJet& a, const EdgeJet& b) {
        return std::conj(a[3]) * b[0] + 3.0 * std::conj(a[2]) * b[1] + 3.0 * std::conj(a[1]) * b[2] +
               std::conj(a[0]) * b[3];
    };
    const double h2 = h * h;
    return -h2 / 12.0 * (slope(a_hi, b_hi) - slope(a_lo, b_lo)) + h2 * h2 / 720.0 * (third(a_hi, b_hi) - third(a_lo, b_lo));
}

} // namespace qrm::detail
