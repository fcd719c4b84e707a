#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qrm/bands.hpp"

using namespace qrm;

TEST_CASE("plane-wave matrix examples")
{
    const Eigen::MatrixXd h0 = hp_matrix(0.0, 0.0, 1);
    REQUIRE(h0.rows() == 4);
    CHECK(h0.diagonal().isApprox(Eigen::Vector4d(36, 4, 4, 36)));
    CHECK((h0 - Eigen::MatrixXd(h0.diagonal().asDiagonal())).norm() == 0.0);

    const Eigen::MatrixXd h2 = hp_matrix(0.0, 2.0, 1);
    for (int i = 0; i + 1 < 4; ++i) {
        CHECK(h2(i, i + 1) == 0.5);
        CHECK(h2(i + 1, i) == 0.5);
    }
    CHECK(h2(0, 2) == 0.0);
    CHECK(h2(0, 3) == 0.0);

    CHECK(hp_matrix(1.0, 0.0, 1).diagonal().isApprox(Eigen::Vector4d(25, 1, 9, 49)));
    CHECK_THROWS_AS(hp_matrix(0.0, 1.0, 0), DomainError);
}

TEST_CASE("band energies at the zone centre")
{
    const auto free = band_energies(0.0, 0.0, 2);
    CHECK(free[0] == doctest::Approx(4.0));
    CHECK(free[1] == doctest::Approx(4.0));

    const auto lattice = band_energies(0.0, 2.0, 2);
    CHECK(std::abs((lattice[1] - lattice[0]) - 1.0) < 0.05);

    // only n_b = 0, 1: 4 -+ v/4
    const auto two = two_band_energies(0.0, 2.0);
    CHECK(std::abs(two[1] - two[0] - 1.0) < 1e-12);
    const Eigen::Matrix2d block = hp_matrix(0.0, 2.0, 1).block(1, 1, 2, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
    CHECK(std::abs(es.eigenvalues()(1) - es.eigenvalues()(0) - 1.0) < 1e-12);
}

TEST_CASE("bands are symmetric in q and converge in n_max")
{
    for (double v : {0.5, 2.0, 10.0}) {
        for (double q : {0.13, 0.9, 1.7}) {
            const auto a = band_energies(q, v, 4);
            const auto b = band_energies(-q, v, 4);
            for (int i = 0; i < 4; ++i)
                CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
            const auto lo = band_energies(q, v, 2, 8);
            const auto hi = band_energies(q, v, 2, 16);
            CHECK(std::abs(lo[0] - hi[0]) < 1e-10);
            CHECK(std::abs(lo[1] - hi[1]) < 1e-10);
        }
    }
}

TEST_CASE("bands ascend and match the two-band limit near the centre")
{
    const double v = 2.0;
    for (double q = -1.0; q <= 1.0; q += 0.125) {
        const auto e = band_energies(q, v, 4);
        CHECK(std::is_sorted(e.begin(), e.end()));
        const auto two = two_band_energies(q, v);
        const double gap = e[1] - e[0];
        CHECK(std::abs(e[0] - two[0]) < 0.02 * gap);
        CHECK(std::abs(e[1] - two[1]) < 0.02 * gap);
    }
}

TEST_CASE("dispersion scan")
{
    const auto free = dispersion_scan(0.0, 1, 64);
    REQUIRE(free.q_grid.size() == 64);
    CHECK(free.q_grid(0) == -2.0);
    Eigen::Index arg = 0;
    const double lowest = free.energies.row(0).minCoeff(&arg);
    CHECK(lowest == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(free.q_grid(arg) == -2.0);
    for (Eigen::Index i = 0; i < 64; ++i) {
        const double q = free.q_grid(i);
        CHECK(free.energies(0, i) == doctest::Approx(std::min((q - 2) * (q - 2), (q + 2) * (q + 2))));
    }

    const auto lattice = dispersion_scan(2.0, 2, 80);
    Eigen::VectorXd gap = (lattice.energies.row(1) - lattice.energies.row(0)).transpose();
    gap.minCoeff(&arg);
    CHECK(lattice.q_grid(arg) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lattice.free_energies.rows() == 2);
    CHECK(lattice.free_energies(0, 40) == doctest::Approx(4.0));
}
