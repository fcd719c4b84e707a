#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "qrm/errors.hpp"

namespace qrm {

inline constexpr int default_plane_wave_cutoff = 12;

/// Physical momentum (units of hbar*k0) of Bloch label (q, n_b): p = q + (2 n_b - 1) * 2.
template <typename Scalar>
Scalar bloch_momentum(Scalar q, int band)
{
    return q + Scalar(2 * band - 1) * Scalar(2);
}

/// Periodic Hamiltonian at fixed quasi-momentum q in the plane-wave basis
/// n_b = -n_max .. n_max+1. Tridiagonal: kinetic p^2 on the diagonal and v/4
/// between neighbouring plane waves. Row i holds n_b = i - n_max.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hp_matrix(Scalar q, Scalar v, int n_max)
{
    if (n_max < 1)
        throw DomainError("hp_matrix: n_max must be >= 1");
    const int dim = 2 * n_max + 2;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> h =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const Scalar p = bloch_momentum(q, i - n_max);
        h(i, i) = p * p;
        if (i + 1 < dim) {
            h(i, i + 1) = v / Scalar(4);
            h(i + 1, i) = v / Scalar(4);
        }
    }
    return h;
}

/// Lowest n_bands eigenvalues of hp_matrix, ascending. Requires n_bands <= 2*n_max.
std::vector<double> band_energies(double q, double v, int n_bands, int n_max = default_plane_wave_cutoff);

/// Closed-form eigenvalues of the two-plane-wave block {n_b = 0, 1}:
/// 4 + q^2 -/+ sqrt(16 q^2 + (v/4)^2).
std::array<double, 2> two_band_energies(double q, double v);

struct BandTable {
    double v = 0.0;
    int n_max = default_plane_wave_cutoff;
    Eigen::VectorXd q_grid;
    Eigen::MatrixXd energies;      ///< (band, q)
    Eigen::MatrixXd free_energies; ///< same layout at v = 0
    /// Per q point: plane-wave coefficients, one column per band.
    std::vector<Eigen::MatrixXd> eigenvectors;
};

/// Bands on the uniform grid q_i = -2 + 4 i / q_resolution, i < q_resolution.
BandTable dispersion_scan(double v, int n_bands, int q_resolution, int n_max = default_plane_wave_cutoff);

} // namespace qrm
