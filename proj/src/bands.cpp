#include "qrm/bands.hpp"

#include <cmath>
#include <sstream>

namespace qrm {

namespace {

struct Diagonalized {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

Diagonalized diagonalize(double q, double v, int n_max, bool with_vectors)
{
    const Eigen::MatrixXd h = hp_matrix<double>(q, v, n_max);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        h, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "band diagonalization failed at q=" << q << " v=" << v << " n_max=" << n_max
            << " (diagonal range " << h.diagonal().minCoeff() << ".." << h.diagonal().maxCoeff()
            << ", frobenius norm " << h.norm() << ")";
        throw NumericalFault(msg.str(), -1);
    }
    Diagonalized out{solver.eigenvalues(), {}};
    if (with_vectors)
        out.vectors = solver.eigenvectors();
    return out;
}

void check_band_count(int n_bands, int n_max)
{
    if (n_max < 1)
        throw DomainError("band_energies: n_max must be >= 1");
    if (n_bands < 1 || n_bands > 2 * n_max)
        throw DomainError("band_energies: need 1 <= n_bands <= 2*n_max");
}

} // namespace

std::vector<double> band_energies(double q, double v, int n_bands, int n_max)
{
    check_band_count(n_bands, n_max);
    const auto d = diagonalize(q, v, n_max, false);
    return {d.values.data(), d.values.data() + n_bands};
}

std::array<double, 2> two_band_energies(double q, double v)
{
    const double split = std::hypot(4.0 * q, v / 4.0);
    return {4.0 + q * q - split, 4.0 + q * q + split};
}

BandTable dispersion_scan(double v, int n_bands, int q_resolution, int n_max)
{
    if (q_resolution < 2)
        throw DomainError("dispersion_scan: q_resolution must be >= 2");
    check_band_count(n_bands, n_max);

    BandTable table;
    table.v = v;
    table.n_max = n_max;
    table.q_grid.resize(q_resolution);
    table.energies.resize(n_bands, q_resolution);
    table.free_energies.resize(n_bands, q_resolution);
    table.eigenvectors.resize(q_resolution);
    for (int i = 0; i < q_resolution; ++i) {
        const double q = -2.0 + 4.0 * i / q_resolution;
        table.q_grid(i) = q;
        const auto d = diagonalize(q, v, n_max, true);
        table.energies.col(i) = d.values.head(n_bands);
        table.eigenvectors[i] = d.vectors.leftCols(n_bands);
        table.free_energies.col(i) = diagonalize(q, 0.0, n_max, false).values.head(n_bands);
    }
    return table;
}

} // namespace qrm
